#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sncse/adamw.hpp"
#include "sncse/data.hpp"
#include "sncse/encoder.hpp"
#include "sncse/evaluation.hpp"
#include "sncse/objectives.hpp"

namespace sncse::train {

enum class LossMode { SNCSE, InfoNCE, PL, NL };

LossMode loss_mode_from_string(const std::string& name);
const char* loss_mode_name(LossMode mode);

struct RunConfig {
    obj::Hyperparams hyper;
    LossMode loss_mode = LossMode::SNCSE;
    int epochs = 1;
    int eval_interval = 125;
    int max_steps = 0;  // 0 = run all epochs
    double grad_clip = 1.0;
    int warmup_steps = 0;  // linear warmup when > 0
    std::string checkpoint_dir;
    std::string corpus_path;      // one sentence per line; used when no negations file
    std::string negations_path;   // TSV original<TAB>negation
    std::string heldout_path;     // TSV pairs for the held-out triplet report
    std::string sts_dir;          // dev evaluation root
    std::string dev_subtask = "toy";
    enc::EncoderDims arch;        // vocab_size filled in from the corpus
    int vocab_min_freq = 2;
    num::AdamWConfig adamw;       // lr is taken from hyper.lr

    void validate() const;
};

struct StepRecord {
    int step = 0;
    int epoch = 0;
    double total = 0.0;
    double infonce = 0.0;
    double bml = 0.0;        // SNCSE mode
    double mean_delta = 0.0; // SNCSE mode
    double pl = 0.0;         // PL mode
    double nl = 0.0;         // NL mode
};

struct EvalRecord {
    int step = 0;
    double dev_rho = 0.0;
    bool is_best = false;
};

struct TrainLog {
    std::vector<StepRecord> steps;
    std::vector<EvalRecord> evals;
    double best_dev_rho = 0.0;
    int best_step = -1;
    bool has_dev = false;
    std::string best_checkpoint;
    std::string last_checkpoint;
    eval::TripletEval heldout;
    bool has_heldout = false;
};

// Deterministic given the seed; model selection by dev Spearman at eval
// intervals; the best-dev checkpoint is the final artifact, the last step is
// kept alongside it.
TrainLog train(const RunConfig& config);

struct SweepResult {
    double alpha = 0.0;
    double beta = 0.0;
    double lambda = 0.0;
    double dev_rho = 0.0;
    std::string label;  // "upper difference ignored" when beta disables the cap
};

std::vector<SweepResult> sweep(const RunConfig& base, std::vector<double> alphas,
                               std::vector<double> betas, std::vector<double> lambdas,
                               int threads = 1);

void write_sweep_csv(std::ostream& out, const std::vector<SweepResult>& results);

}  // namespace sncse::train

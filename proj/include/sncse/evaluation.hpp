#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sncse/data.hpp"
#include "sncse/model.hpp"

namespace sncse::eval {

// Fractional (average) ranks, 1-based; ties share the mean of their positions.
std::vector<double> fractional_ranks(const std::vector<double>& xs);

// Tie-corrected Spearman: Pearson correlation of the two fractional rank
// vectors. Equals the closed form exactly when no ties exist.
double spearman(const std::vector<double>& gold, const std::vector<double>& pred);

// Closed form 1 - sum(d^2) / ((n^3 - n) / 6) over the rank vectors.
double spearman_closed_form(const std::vector<double>& gold, const std::vector<double>& pred);

struct PairResult {
    std::string sentence1;
    std::string sentence2;
    double gold = 0.0;
    double cosine = 0.0;
    double rank_gold = 0.0;  // R_G, ascending (rank 1 = lowest similarity)
    double rank_est = 0.0;   // R_E
    double sq_rank_error = 0.0;
};

struct SubtaskReport {
    std::string subtask;
    double rho = 0.0;
    std::optional<double> rho_closed_form;  // present when it differs by > 1e-9
    int excluded_pairs = 0;
    std::vector<PairResult> pairs;
};

struct EvalReport {
    std::vector<SubtaskReport> subtasks;
    double average_rho = 0.0;

    nlohmann::json to_json() const;
};

// Builds one subtask's report from (gold, cosine) pairs. Exposed so synthetic
// reports can be constructed without a model.
SubtaskReport score_subtask(const std::string& name, std::vector<PairResult> pairs);

// Evaluation-mode embeddings with the original prompt on both sides; cosine
// per pair; Spearman per subtask; unweighted average across subtasks.
EvalReport evaluate(const enc::Model& model, const data::STSData& sts, const std::string& split);

struct ErrorEntry {
    PairResult pair;
    std::string direction;  // "overestimated" | "underestimated" | "exact"
};

struct SubtaskErrors {
    std::string subtask;
    std::vector<ErrorEntry> top;
    bool truncated_to_n = false;  // k exceeded the pair count
};

std::vector<SubtaskErrors> error_analysis(const EvalReport& report, int k);

void write_error_analysis_tsv(std::ostream& out, const std::vector<SubtaskErrors>& errors);

struct SimilarityDistribution {
    static constexpr int kBins = 200;  // width 0.01 over [-1, 1]
    std::vector<int> positive;
    std::vector<int> negative;
    std::vector<int> soft_negative;
    double peak_positive = 0.0;
    double peak_negative = 0.0;
    double peak_soft_negative = 0.0;
    int sample_size = 0;
};

// Positive pairs are each sentence with itself at the conventional similarity
// of 1.0; soft negatives pair a sentence with its negation; negatives pair it
// with an independently drawn other sentence.
SimilarityDistribution similarity_distribution(const enc::Model& model,
                                               const std::vector<data::SentencePair>& pairs,
                                               int sample_size, uint64_t seed);

void write_distribution_csv(std::ostream& out, const SimilarityDistribution& dist);

struct TripletEval {
    double mean_cos_positive = 0.0;
    double mean_cos_soft_negative = 0.0;
    double mean_delta = 0.0;
    int count = 0;
};

// Mean cos(h, h+) and cos(h, h#) over (sentence, negation) pairs using the
// training-path readout, the quantity the margin loss constrains.
TripletEval triplet_eval(const enc::Model& model, const std::vector<data::SentencePair>& pairs);

}  // namespace sncse::eval

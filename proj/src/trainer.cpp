#include "sncse/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include "json.hpp"
#include "sncse/model.hpp"
#include "sncse/rng.hpp"

namespace fs = std::filesystem;

namespace sncse::train {

using data::SentencePair;
using data::TripletBatch;
using enc::EncodeOptions;
using enc::Model;
using num::Graph;
using num::Node;
using num::Tensor;

LossMode loss_mode_from_string(const std::string& name) {
    if (name == "sncse") return LossMode::SNCSE;
    if (name == "infonce") return LossMode::InfoNCE;
    if (name == "pl") return LossMode::PL;
    if (name == "nl") return LossMode::NL;
    throw ConfigError("unknown loss mode '" + name + "' (expected sncse|infonce|pl|nl)");
}

const char* loss_mode_name(LossMode mode) {
    switch (mode) {
        case LossMode::SNCSE: return "sncse";
        case LossMode::InfoNCE: return "infonce";
        case LossMode::PL: return "pl";
        case LossMode::NL: return "nl";
    }
    return "?";
}

void RunConfig::validate() const {
    hyper.validate();
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (eval_interval < 1) throw ConfigError("eval interval must be >= 1");
    if (max_steps < 0) throw ConfigError("max_steps must be >= 0");
    if (grad_clip < 0.0) throw ConfigError("grad_clip must be >= 0");
    if (checkpoint_dir.empty()) throw ConfigError("checkpoint_dir is required");
    if (corpus_path.empty() && negations_path.empty())
        throw ConfigError("either a corpus or a negation pair file is required");
    const bool needs_negations = loss_mode != LossMode::InfoNCE;
    if (needs_negations && negations_path.empty())
        throw ConfigError(std::string("loss mode ") + loss_mode_name(loss_mode) +
                          " requires a negation pair file");
}

namespace {

bool needs_soft_negative(LossMode mode) { return mode != LossMode::InfoNCE; }

// Normalizes -0.0 so branches that contribute exact zeros (a margin term with
// weight zero) leave gradients bit-identical to their absence.
void flush_signed_zero(Tensor& g) {
    for (double& x : g.values()) x += 0.0;
}

struct StepOutcome {
    StepRecord record;
    std::map<std::string, Tensor> grads;
};

StepOutcome run_step(const RunConfig& config, enc::EncoderParams& params,
                     const TripletBatch& batch, int step, int epoch) {
    const obj::Hyperparams& hp = config.hyper;

    Graph g;
    enc::BoundParams bound = enc::bind_params(g, params, true);

    std::vector<enc::TemplatedSequence> seq_x, seq_p, seq_n;
    std::vector<uint64_t> seeds_x, seeds_p, seeds_n;
    for (const auto& t : batch.triplets) {
        seq_x.push_back(t.original);
        seq_p.push_back(t.positive);
        seeds_x.push_back(t.seed_original);
        seeds_p.push_back(t.seed_positive);
        if (needs_soft_negative(config.loss_mode)) {
            seq_n.push_back(t.soft_negative);
            seeds_n.push_back(num::mix(t.seed_positive, 0x536F6674u));  // soft-negative stream
        }
    }

    EncodeOptions opt;
    opt.training = true;
    opt.dropout_rate = hp.dropout;

    opt.seeds = seeds_x;
    Node* H = enc::encode_batch(g, bound, params.dims, seq_x, opt);
    opt.seeds = seeds_p;
    Node* Hp = enc::encode_batch(g, bound, params.dims, seq_p, opt);
    Node* Hn = nullptr;
    if (needs_soft_negative(config.loss_mode)) {
        opt.seeds = seeds_n;
        Hn = enc::encode_batch(g, bound, params.dims, seq_n, opt);
    }

    Node* infonce = obj::infonce_loss(g, H, Hp, hp.tau);
    Node* delta = nullptr;
    Node* bml = nullptr;
    Node* loss = nullptr;
    Node* pl = nullptr;
    Node* nl = nullptr;
    switch (config.loss_mode) {
        case LossMode::SNCSE:
            delta = obj::delta_col(g, H, Hp, Hn);
            bml = obj::bml_loss(g, delta, hp.alpha, hp.beta);
            loss = obj::total_loss(g, infonce, bml, hp.lambda);
            break;
        case LossMode::InfoNCE:
            loss = infonce;
            break;
        case LossMode::PL:
            pl = obj::pl_loss(g, H, Hp, Hn, hp.tau);
            loss = pl;
            break;
        case LossMode::NL:
            nl = obj::nl_loss(g, H, Hp, Hn, hp.tau);
            loss = nl;
            break;
    }

    try {
        g.forward();
    } catch (const NumericError& e) {
        throw NumericError("training aborted at step " + std::to_string(step) + ": " + e.what());
    }
    g.backward(loss);

    StepOutcome out;
    out.record.step = step;
    out.record.epoch = epoch;
    out.record.total = loss->val.item();
    out.record.infonce = infonce->val.item();
    if (bml) out.record.bml = bml->val.item();
    if (delta) {
        double sum = 0.0;
        for (double d : delta->val.values()) sum += d;
        out.record.mean_delta = sum / static_cast<double>(delta->val.numel());
    }
    if (pl) out.record.pl = pl->val.item();
    if (nl) out.record.nl = nl->val.item();
    if (std::isnan(out.record.total))
        throw NumericError("training aborted at step " + std::to_string(step) +
                           ": NaN loss (infonce=" + std::to_string(out.record.infonce) +
                           ", bml=" + std::to_string(out.record.bml) + ")");

    for (auto& [name, node] : bound.by_name) {
        Tensor grad = node->grad.numel() ? node->grad
                                         : Tensor::zeros(node->val.rows(), node->val.cols());
        flush_signed_zero(grad);
        out.grads.emplace(name, std::move(grad));
    }
    return out;
}

void clip_gradients(std::map<std::string, Tensor>& grads, double max_norm) {
    if (max_norm <= 0.0) return;
    double sq = 0.0;
    for (const auto& [name, g] : grads)
        for (double x : g.values()) sq += x * x;
    const double norm = std::sqrt(sq);
    if (norm <= max_norm) return;
    const double scale = max_norm / norm;
    for (auto& [name, g] : grads)
        for (double& x : g.values()) x *= scale;
}

nlohmann::json step_json(const RunConfig& config, const StepRecord& r) {
    nlohmann::json j;
    j["event"] = "step";
    j["step"] = r.step;
    j["epoch"] = r.epoch;
    j["total"] = r.total;
    j["infonce"] = r.infonce;
    if (config.loss_mode == LossMode::SNCSE) {
        j["bml"] = r.bml;
        j["mean_delta"] = r.mean_delta;
    }
    if (config.loss_mode == LossMode::PL) j["pl"] = r.pl;
    if (config.loss_mode == LossMode::NL) j["nl"] = r.nl;
    return j;
}

}  // namespace

TrainLog train(const RunConfig& config) {
    config.validate();

    // Training pairs: the negation file when present (its first column is the
    // corpus), otherwise bare corpus lines.
    std::vector<SentencePair> pairs;
    if (!config.negations_path.empty()) {
        pairs = data::load_pairs_tsv(config.negations_path);
    } else {
        for (auto& line : data::load_corpus(config.corpus_path)) pairs.push_back({line, ""});
    }
    if (pairs.empty()) throw DataError("training set is empty");

    std::vector<std::string> vocab_lines;
    for (const auto& p : pairs) {
        vocab_lines.push_back(p.original);
        if (!p.negation.empty()) vocab_lines.push_back(p.negation);
    }
    enc::Vocabulary vocab = enc::Vocabulary::build(vocab_lines, config.vocab_min_freq);

    enc::EncoderDims dims = config.arch;
    dims.vocab_size = vocab.size();
    enc::EncoderParams params = enc::EncoderParams::init(config.hyper.seed, dims);

    num::AdamWConfig opt_cfg = config.adamw;
    opt_cfg.lr = config.hyper.lr;
    num::AdamW opt(opt_cfg);

    fs::create_directories(config.checkpoint_dir);
    std::ofstream log_out(fs::path(config.checkpoint_dir) / "train_log.jsonl");
    if (!log_out) throw IoError("cannot write train log in '" + config.checkpoint_dir + "'");

    data::STSData dev_sts;
    const bool has_dev = !config.sts_dir.empty();
    if (has_dev) dev_sts = data::load_sts(config.sts_dir, {config.dev_subtask});

    TrainLog log;
    log.has_dev = has_dev;
    log.best_dev_rho = -2.0;
    const std::string best_path = (fs::path(config.checkpoint_dir) / "best.ckpt").string();
    const std::string last_path = (fs::path(config.checkpoint_dir) / "last.ckpt").string();

    auto dev_eval = [&](int step) {
        Model view{params, vocab};
        eval::EvalReport report = eval::evaluate(view, dev_sts, "dev");
        EvalRecord rec;
        rec.step = step;
        rec.dev_rho = report.average_rho;
        rec.is_best = report.average_rho > log.best_dev_rho;
        if (rec.is_best) {
            log.best_dev_rho = report.average_rho;
            log.best_step = step;
            view.save(best_path, &opt);
            log.best_checkpoint = best_path;
        }
        log.evals.push_back(rec);
        nlohmann::json j;
        j["event"] = "eval";
        j["step"] = step;
        j["dev_rho"] = rec.dev_rho;
        j["is_best"] = rec.is_best;
        log_out << j.dump() << "\n";
    };

    int step = 0;
    bool stopped = false;
    const uint64_t shuffle_root = num::substream(config.hyper.seed, "shuffle");
    for (int epoch = 0; epoch < config.epochs && !stopped; ++epoch) {
        auto batches = data::make_batches(pairs, vocab, config.hyper,
                                          num::mix(shuffle_root, static_cast<uint64_t>(epoch)));
        for (const auto& batch : batches) {
            ++step;
            StepOutcome outcome = run_step(config, params, batch, step, epoch);
            clip_gradients(outcome.grads, config.grad_clip);

            if (config.warmup_steps > 0)
                opt.set_lr(config.hyper.lr *
                           std::min(1.0, static_cast<double>(step) / config.warmup_steps));
            opt.step_begin();
            params.for_each([&](const std::string& name, Tensor& t) {
                opt.update(name, t, outcome.grads.at(name));
            });

            log.steps.push_back(outcome.record);
            log_out << step_json(config, outcome.record).dump() << "\n";

            if (has_dev && step % config.eval_interval == 0) dev_eval(step);
            if (config.max_steps > 0 && step >= config.max_steps) {
                stopped = true;
                break;
            }
        }
    }

    if (has_dev && (log.evals.empty() || log.evals.back().step != step)) dev_eval(step);

    Model final_view{params, vocab};
    final_view.save(last_path, &opt);
    log.last_checkpoint = last_path;
    if (!has_dev) {
        log.best_checkpoint = last_path;
    }

    nlohmann::json fin;
    fin["event"] = "final";
    fin["steps"] = step;
    fin["loss_mode"] = loss_mode_name(config.loss_mode);
    if (has_dev) {
        fin["best_dev_rho"] = log.best_dev_rho;
        fin["best_step"] = log.best_step;
    }

    if (!config.heldout_path.empty()) {
        auto heldout_pairs = data::load_pairs_tsv(config.heldout_path);
        log.heldout = eval::triplet_eval(final_view, heldout_pairs);
        log.has_heldout = true;
        fin["heldout_mean_cos_positive"] = log.heldout.mean_cos_positive;
        fin["heldout_mean_cos_soft_negative"] = log.heldout.mean_cos_soft_negative;
        fin["heldout_mean_delta"] = log.heldout.mean_delta;
        std::ofstream te_out(fs::path(config.checkpoint_dir) / "triplet_eval.json");
        nlohmann::json te;
        te["mean_cos_positive"] = log.heldout.mean_cos_positive;
        te["mean_cos_soft_negative"] = log.heldout.mean_cos_soft_negative;
        te["mean_delta"] = log.heldout.mean_delta;
        te["count"] = log.heldout.count;
        te_out << te.dump(2) << "\n";
    }
    log_out << fin.dump() << "\n";
    return log;
}

std::vector<SweepResult> sweep(const RunConfig& base, std::vector<double> alphas,
                               std::vector<double> betas, std::vector<double> lambdas,
                               int threads) {
    if (alphas.empty() || betas.empty() || lambdas.empty())
        throw ConfigError("sweep: every grid axis needs at least one value");
    if (base.sts_dir.empty()) throw ConfigError("sweep: dev evaluation data is required");

    struct Cell {
        RunConfig config;
        SweepResult result;
    };
    std::vector<Cell> cells;
    for (double a : alphas)
        for (double b : betas)
            for (double l : lambdas) {
                Cell cell;
                cell.config = base;
                cell.config.loss_mode = LossMode::SNCSE;
                cell.config.hyper.alpha = a;
                cell.config.hyper.beta = b;
                cell.config.hyper.lambda = l;
                char sub[96];
                std::snprintf(sub, sizeof(sub), "cell_a%g_b%g_l%g", a, b, l);
                cell.config.checkpoint_dir = (fs::path(base.checkpoint_dir) / sub).string();
                cell.result.alpha = a;
                cell.result.beta = b;
                cell.result.lambda = l;
                cell.result.label = (b == 2.0) ? "upper difference ignored" : "";
                cells.push_back(std::move(cell));
            }

    const int workers = std::max(1, std::min<int>(threads, static_cast<int>(cells.size())));
    std::atomic<size_t> next{0};
    auto run_cells = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            TrainLog log = train(cells[i].config);
            cells[i].result.dev_rho = log.best_dev_rho;
        }
    };
    if (workers == 1) {
        run_cells();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(run_cells);
        for (auto& t : pool) t.join();
    }

    std::vector<SweepResult> results;
    results.reserve(cells.size());
    for (auto& c : cells) results.push_back(std::move(c.result));
    std::stable_sort(results.begin(), results.end(),
                     [](const SweepResult& x, const SweepResult& y) { return x.dev_rho > y.dev_rho; });
    return results;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepResult>& results) {
    out << "alpha,beta,lambda,dev_rho,label\n";
    for (const auto& r : results)
        out << r.alpha << "," << r.beta << "," << r.lambda << "," << r.dev_rho << "," << r.label
            << "\n";
}

}  // namespace sncse::train

// Single entry point: negate, train, sweep, eval, analyze, simdist, gradcheck.
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sncse/config.hpp"
#include "sncse/data.hpp"
#include "sncse/evaluation.hpp"
#include "sncse/gradient_suite.hpp"
#include "sncse/model.hpp"
#include "sncse/negation.hpp"
#include "sncse/trainer.hpp"

using namespace sncse;

namespace {

std::vector<double> parse_grid(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

std::vector<std::string> parse_list(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

struct FlagMap {
    CLI::App* cmd;
    cli::Settings settings;
    std::map<std::string, std::string>* raw;

    // Explicit flags beat config-file values which beat defaults.
    void finalize(const std::string& config_path) {
        if (!config_path.empty()) settings = cli::Settings(config_path);
        for (const auto& [key, value] : *raw)
            if (cmd->count("--" + key) > 0) settings.override_value(key, value);
    }
};

train::RunConfig run_config_from(const cli::Settings& s) {
    train::RunConfig cfg;
    cfg.hyper.tau = s.get_double("tau", 0.05);
    cfg.hyper.alpha = s.get_double("alpha", 0.1);
    cfg.hyper.beta = s.get_double("beta", 0.3);
    cfg.hyper.lambda = s.get_double("lambda", 1e-3);
    cfg.hyper.batch_size = s.get_int("batch_size", 16);
    cfg.hyper.dropout = s.get_double("dropout", 0.1);
    cfg.hyper.lr = s.get_double("lr", 1e-3);
    cfg.hyper.seed = s.get_u64("seed", 42);
    cfg.loss_mode = train::loss_mode_from_string(s.get("loss_mode", "sncse"));
    cfg.epochs = s.get_int("epochs", 1);
    cfg.eval_interval = s.get_int("eval_interval", 125);
    cfg.max_steps = s.get_int("max_steps", 0);
    cfg.grad_clip = s.get_double("grad_clip", 1.0);
    cfg.warmup_steps = s.get_int("warmup_steps", 0);
    cfg.checkpoint_dir = s.get_path("checkpoint_dir", "checkpoints");
    cfg.corpus_path = s.get_path("corpus", "");
    cfg.negations_path = s.get_path("negations", "");
    cfg.heldout_path = s.get_path("heldout", "");
    cfg.sts_dir = s.get_path("sts_dir", "");
    cfg.dev_subtask = s.get("dev_subtask", "toy");
    cfg.vocab_min_freq = s.get_int("min_freq", 2);
    cfg.arch.d_model = s.get_int("d_model", 64);
    cfg.arch.n_heads = s.get_int("n_heads", 4);
    cfg.arch.n_layers = s.get_int("n_layers", 2);
    cfg.arch.ff_dim = s.get_int("ff_dim", 128);
    cfg.arch.max_len = s.get_int("max_len", 64);
    cfg.adamw.beta1 = s.get_double("adam_beta1", 0.9);
    cfg.adamw.beta2 = s.get_double("adam_beta2", 0.999);
    cfg.adamw.eps = s.get_double("adam_eps", 1e-8);
    cfg.adamw.weight_decay = s.get_double("weight_decay", 0.01);
    return cfg;
}

void add_run_flags(CLI::App* cmd, std::map<std::string, std::string>& raw) {
    for (const char* key :
         {"tau", "alpha", "beta", "lambda", "batch_size", "dropout", "lr", "seed", "loss_mode",
          "epochs", "eval_interval", "max_steps", "grad_clip", "warmup_steps", "checkpoint_dir",
          "corpus", "negations", "heldout", "sts_dir", "dev_subtask", "min_freq", "d_model",
          "n_heads", "n_layers", "ff_dim", "max_len", "adam_beta1", "adam_beta2", "adam_eps",
          "weight_decay"})
        cmd->add_option("--" + std::string(key), raw[key]);
}

int cmd_negate(const std::string& conllu, const std::string& out_path,
               const std::string& report_path, bool skip_negated) {
    neg::ConlluResult parsed = neg::load_conllu(conllu);
    if (parsed.skipped_missing_root > 0)
        std::cerr << "warning: skipped " << parsed.skipped_missing_root
                  << " sentence(s) without a root\n";
    std::vector<std::string> sentences;
    for (const auto& s : parsed.sentences) sentences.push_back(s.text);
    neg::CorpusNegation result = neg::negate_corpus(sentences, parsed.sentences, skip_negated);

    std::ofstream out(out_path);
    if (!out) throw IoError("cannot write '" + out_path + "'");
    neg::write_pairs_tsv(out, result);
    if (!report_path.empty()) {
        std::ofstream report(report_path);
        if (!report) throw IoError("cannot write '" + report_path + "'");
        neg::write_skip_report_json(report, result);
    }
    std::cout << result.pairs.size() << " pair(s) written, " << result.skips.size()
              << " skip(s)\n";
    return 0;
}

int cmd_train(const cli::Settings& settings) {
    train::RunConfig cfg = run_config_from(settings);
    train::TrainLog log = train::train(cfg);
    std::cout << "trained " << log.steps.size() << " step(s), loss mode "
              << train::loss_mode_name(cfg.loss_mode) << "\n";
    if (log.has_dev)
        std::cout << "best dev rho " << log.best_dev_rho << " at step " << log.best_step << "\n";
    if (log.has_heldout)
        std::cout << "held-out mean delta " << log.heldout.mean_delta << " (cos+ "
                  << log.heldout.mean_cos_positive << ", cos# "
                  << log.heldout.mean_cos_soft_negative << ")\n";
    std::cout << "checkpoints: " << log.best_checkpoint << " (best), " << log.last_checkpoint
              << " (last)\n";
    return 0;
}

int cmd_sweep(const cli::Settings& settings, const std::string& alphas, const std::string& betas,
              const std::string& lambdas, const std::string& out_path, int threads) {
    train::RunConfig base = run_config_from(settings);
    // Paper sweep axes by default; lambda per the published ablation grid.
    auto a = alphas.empty() ? std::vector<double>{0.0, 0.1, 0.2} : parse_grid(alphas);
    auto b = betas.empty() ? std::vector<double>{0.2, 0.3, 0.4, 2.0} : parse_grid(betas);
    auto l = lambdas.empty() ? std::vector<double>{1e-2, 1e-3, 1e-4, 1e-5} : parse_grid(lambdas);
    auto results = train::sweep(base, a, b, l, threads);
    std::ofstream out(out_path);
    if (!out) throw IoError("cannot write '" + out_path + "'");
    train::write_sweep_csv(out, results);
    std::cout << results.size() << " cell(s) swept, best dev rho " << results.front().dev_rho
              << " at alpha=" << results.front().alpha << " beta=" << results.front().beta
              << " lambda=" << results.front().lambda << "\n";
    return 0;
}

void write_pairs_table(const std::string& path, const eval::EvalReport& report) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "subtask\tsentence1\tsentence2\tgold\tcosine\tR_G\tR_E\tsq_error\n";
    for (const auto& sub : report.subtasks)
        for (const auto& p : sub.pairs)
            out << sub.subtask << "\t" << p.sentence1 << "\t" << p.sentence2 << "\t" << p.gold
                << "\t" << p.cosine << "\t" << p.rank_gold << "\t" << p.rank_est << "\t"
                << p.sq_rank_error << "\n";
}

int cmd_eval(const std::string& checkpoint, const std::string& sts_dir,
             const std::string& subtasks, const std::string& split, const std::string& out_path,
             bool verify_counts) {
    enc::Model model = enc::Model::load(checkpoint);
    data::STSData sts = subtasks.empty() ? data::load_sts(sts_dir)
                                         : data::load_sts(sts_dir, parse_list(subtasks));
    if (verify_counts) data::verify_reference_counts(sts);
    eval::EvalReport report = eval::evaluate(model, sts, split);

    std::ofstream out(out_path);
    if (!out) throw IoError("cannot write '" + out_path + "'");
    out << report.to_json().dump(2) << "\n";
    write_pairs_table(out_path + ".pairs.tsv", report);

    for (const auto& sub : report.subtasks) {
        std::cout << sub.subtask << " rho " << sub.rho;
        if (sub.rho_closed_form) std::cout << " (closed-form " << *sub.rho_closed_form << ")";
        if (sub.excluded_pairs) std::cout << " [" << sub.excluded_pairs << " pair(s) excluded]";
        std::cout << "\n";
    }
    std::cout << "average rho " << report.average_rho << "\n";
    return 0;
}

int cmd_analyze(const std::string& report_path, int k, const std::string& out_path) {
    std::ifstream in(report_path);
    if (!in) throw IoError("cannot open '" + report_path + "'");
    std::string line;
    if (!std::getline(in, line) || line.rfind("subtask\t", 0) != 0)
        throw DataError("'" + report_path + "' is not an eval pairs table");

    std::map<std::string, std::vector<eval::PairResult>> by_subtask;
    std::vector<std::string> order;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string subtask, s1, s2, gold, cos, rg, re, err;
        if (!std::getline(ss, subtask, '\t') || !std::getline(ss, s1, '\t') ||
            !std::getline(ss, s2, '\t') || !std::getline(ss, gold, '\t') ||
            !std::getline(ss, cos, '\t') || !std::getline(ss, rg, '\t') ||
            !std::getline(ss, re, '\t') || !std::getline(ss, err, '\t'))
            throw DataError(report_path + ":" + std::to_string(line_no) + ": malformed row");
        eval::PairResult p;
        p.sentence1 = s1;
        p.sentence2 = s2;
        p.gold = std::stod(gold);
        p.cosine = std::stod(cos);
        p.rank_gold = std::stod(rg);
        p.rank_est = std::stod(re);
        p.sq_rank_error = std::stod(err);
        if (by_subtask.find(subtask) == by_subtask.end()) order.push_back(subtask);
        by_subtask[subtask].push_back(std::move(p));
    }
    eval::EvalReport report;
    for (const auto& name : order) {
        eval::SubtaskReport sub;
        sub.subtask = name;
        sub.pairs = by_subtask[name];
        report.subtasks.push_back(std::move(sub));
    }
    auto errors = eval::error_analysis(report, k);
    std::ofstream out(out_path);
    if (!out) throw IoError("cannot write '" + out_path + "'");
    eval::write_error_analysis_tsv(out, errors);
    for (const auto& sub : errors) {
        std::cout << sub.subtask << ": top " << sub.top.size() << " error pair(s)";
        if (sub.truncated_to_n) std::cout << " (k exceeded pair count)";
        std::cout << "\n";
    }
    return 0;
}

int cmd_simdist(const std::string& checkpoint, const std::string& corpus,
                const std::string& negations, int sample_size, uint64_t seed,
                const std::string& out_path) {
    enc::Model model = enc::Model::load(checkpoint);

    std::vector<data::SentencePair> pairs;
    std::ifstream probe(negations);
    if (!probe) throw IoError("cannot open '" + negations + "'");
    std::string first;
    std::getline(probe, first);
    probe.close();
    if (first.find('\t') != std::string::npos) {
        pairs = data::load_pairs_tsv(negations);
    } else {
        if (corpus.empty())
            throw ConfigError("--corpus is required when the negation file is one per line");
        auto originals = data::load_corpus(corpus);
        auto negs = data::load_corpus(negations);
        if (originals.size() != negs.size())
            throw InputError("corpus and negation line counts differ");
        for (size_t i = 0; i < originals.size(); ++i) pairs.push_back({originals[i], negs[i]});
    }

    auto dist = eval::similarity_distribution(model, pairs, sample_size, seed);
    std::ofstream out(out_path);
    if (!out) throw IoError("cannot write '" + out_path + "'");
    eval::write_distribution_csv(out, dist);
    std::cout << "sampled " << dist.sample_size << " sentence(s)\n"
              << "peak positive " << dist.peak_positive << "\n"
              << "peak soft-negative " << dist.peak_soft_negative << "\n"
              << "peak negative " << dist.peak_negative << "\n";
    return 0;
}

int cmd_gradcheck(uint64_t seed, int trials) {
    auto results = num::run_gradient_suite(seed, trials);
    bool ok = true;
    for (const auto& r : results) {
        std::cout << r.name << " max relative error " << r.max_rel_err << "\n";
        ok = ok && r.max_rel_err < 1e-4;
    }
    std::cout << (ok ? "all gradients within 1e-4" : "GRADIENT CHECK FAILED") << "\n";
    return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SNCSE toolkit: contrastive sentence embeddings with soft negative samples"};
    app.require_subcommand(1);

    // negate
    auto* negate = app.add_subcommand("negate", "Rule-based negation of parsed sentences");
    std::string conllu_path, negate_out = "negations.tsv", negate_report;
    bool skip_negated = false;
    negate->add_option("--conllu", conllu_path, "CoNLL-U input")->required();
    negate->add_option("--out", negate_out, "output TSV (original<TAB>negation)");
    negate->add_option("--report", negate_report, "JSON skip report");
    negate->add_flag("--skip-negated", skip_negated,
                     "drop already-negated sentences instead of removing their negator");

    // train
    auto* train_cmd = app.add_subcommand("train", "Train the prompted encoder");
    std::string train_config;
    std::map<std::string, std::string> train_raw;
    train_cmd->add_option("--config", train_config, "run-config file (key = value)");
    add_run_flags(train_cmd, train_raw);

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "Grid sweep over the margin hyperparameters");
    std::string sweep_config, sweep_alphas, sweep_betas, sweep_lambdas, sweep_out = "sweep.csv";
    int sweep_threads = 1;
    std::map<std::string, std::string> sweep_raw;
    sweep_cmd->add_option("--config", sweep_config, "run-config file");
    sweep_cmd->add_option("--alphas", sweep_alphas, "comma list (default 0,0.1,0.2)");
    sweep_cmd->add_option("--betas", sweep_betas, "comma list (default 0.2,0.3,0.4,2.0)");
    sweep_cmd->add_option("--lambdas", sweep_lambdas, "comma list (default 1e-2,1e-3,1e-4,1e-5)");
    sweep_cmd->add_option("--out", sweep_out, "output CSV");
    sweep_cmd->add_option("--threads", sweep_threads, "parallel sweep cells");
    add_run_flags(sweep_cmd, sweep_raw);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Score a checkpoint on STS data");
    std::string eval_ckpt, eval_sts, eval_subtasks, eval_split = "test",
                eval_out = "eval_report.json";
    bool eval_verify = false;
    eval_cmd->add_option("--checkpoint", eval_ckpt)->required();
    eval_cmd->add_option("--sts-dir", eval_sts)->required();
    eval_cmd->add_option("--subtasks", eval_subtasks, "comma list; default: all directories");
    eval_cmd->add_option("--split", eval_split, "train|dev|test");
    eval_cmd->add_option("--out", eval_out, "report JSON (pairs table lands beside it)");
    eval_cmd->add_flag("--verify-counts", eval_verify,
                       "check pair counts against the published benchmark sizes");

    // analyze
    auto* analyze_cmd = app.add_subcommand("analyze", "Rank-based error analysis of an eval run");
    std::string analyze_report, analyze_out = "error_analysis.tsv";
    int analyze_k = 5;
    analyze_cmd->add_option("--report", analyze_report, "pairs table from eval (*.pairs.tsv)")
        ->required();
    analyze_cmd->add_option("-k,--top", analyze_k, "pairs per subtask");
    analyze_cmd->add_option("--out", analyze_out, "output TSV");

    // simdist
    auto* simdist_cmd =
        app.add_subcommand("simdist", "Cosine similarity distributions over pair populations");
    std::string sd_ckpt, sd_corpus, sd_negs, sd_out = "simdist.csv";
    int sd_n = 5000;
    uint64_t sd_seed = 42;
    simdist_cmd->add_option("--checkpoint", sd_ckpt)->required();
    simdist_cmd->add_option("--corpus", sd_corpus, "one sentence per line");
    simdist_cmd->add_option("--negations", sd_negs, "pair TSV or aligned one-per-line file")
        ->required();
    simdist_cmd->add_option("-n,--sample-size", sd_n);
    simdist_cmd->add_option("--seed", sd_seed);
    simdist_cmd->add_option("--out", sd_out, "histogram CSV");

    // gradcheck
    auto* grad_cmd = app.add_subcommand("gradcheck", "Finite-difference gradient suite");
    uint64_t grad_seed = 42;
    int grad_trials = 10;
    grad_cmd->add_option("--seed", grad_seed);
    grad_cmd->add_option("--trials", grad_trials);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // prints help, exit 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*negate) return cmd_negate(conllu_path, negate_out, negate_report, skip_negated);
        if (*train_cmd) {
            FlagMap fm{train_cmd, cli::Settings{}, &train_raw};
            fm.finalize(train_config);
            return cmd_train(fm.settings);
        }
        if (*sweep_cmd) {
            FlagMap fm{sweep_cmd, cli::Settings{}, &sweep_raw};
            fm.finalize(sweep_config);
            return cmd_sweep(fm.settings, sweep_alphas, sweep_betas, sweep_lambdas, sweep_out,
                             sweep_threads);
        }
        if (*eval_cmd)
            return cmd_eval(eval_ckpt, eval_sts, eval_subtasks, eval_split, eval_out, eval_verify);
        if (*analyze_cmd) return cmd_analyze(analyze_report, analyze_k, analyze_out);
        if (*simdist_cmd) return cmd_simdist(sd_ckpt, sd_corpus, sd_negs, sd_n, sd_seed, sd_out);
        if (*grad_cmd) return cmd_gradcheck(grad_seed, grad_trials);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

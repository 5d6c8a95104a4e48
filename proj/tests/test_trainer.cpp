#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "sncse/fixture.hpp"
#include "sncse/rng.hpp"
#include "sncse/model.hpp"
#include "sncse/negation.hpp"
#include "sncse/tagger.hpp"
#include "sncse/trainer.hpp"

using namespace sncse;
using namespace sncse::train;
namespace fs = std::filesystem;

namespace {

std::string read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

struct MicroFixture {
    fs::path dir;
    RunConfig base;

    explicit MicroFixture(const std::string& name, int sentences = 64) {
        dir = fs::temp_directory_path() / name;
        fs::remove_all(dir);
        fs::create_directories(dir / "sts" / "toy");

        auto pool = data::generate_sentences(sentences + 40, 123);
        std::vector<std::string> corpus(pool.begin(), pool.begin() + sentences);
        auto parses = neg::heuristic_parse_corpus(corpus);
        auto negs = neg::negate_corpus(corpus, parses);
        {
            std::ofstream os(dir / "negations.tsv");
            neg::write_pairs_tsv(os, negs);
        }
        {
            std::ofstream os(dir / "corpus.txt");
            for (const auto& s : corpus) os << s << "\n";
        }
        auto sts = data::generate_sts_pairs(pool, 40, 5);
        {
            std::ofstream os(dir / "sts" / "toy" / "dev.tsv");
            for (const auto& p : sts) os << p.score << "\t" << p.sentence1 << "\t" << p.sentence2 << "\n";
        }

        base.hyper.batch_size = 8;
        base.hyper.lr = 2e-3;
        base.hyper.seed = 42;
        base.arch.d_model = 16;
        base.arch.n_heads = 2;
        base.arch.n_layers = 2;
        base.arch.ff_dim = 24;
        base.arch.max_len = 40;
        base.eval_interval = 1000;  // end-of-training eval only
        base.corpus_path = (dir / "corpus.txt").string();
        base.negations_path = (dir / "negations.tsv").string();
        base.sts_dir = (dir / "sts").string();
        base.checkpoint_dir = (dir / "run").string();
    }
    ~MicroFixture() { fs::remove_all(dir); }
};

}  // namespace

TEST_CASE("sncse with lambda 0 and infonce-only produce bitwise-identical checkpoints") {
    MicroFixture fx("sncse_trainer_bitwise");

    RunConfig a = fx.base;
    a.loss_mode = LossMode::SNCSE;
    a.hyper.lambda = 0.0;
    a.max_steps = 20;
    a.epochs = 10;
    a.checkpoint_dir = (fx.dir / "run_a").string();

    RunConfig b = fx.base;
    b.loss_mode = LossMode::InfoNCE;
    b.max_steps = 20;
    b.epochs = 10;
    b.checkpoint_dir = (fx.dir / "run_b").string();

    TrainLog la = sncse::train::train(a);
    TrainLog lb = sncse::train::train(b);
    CHECK(read_bytes(la.last_checkpoint) == read_bytes(lb.last_checkpoint));
    CHECK(read_bytes(la.last_checkpoint + ".vocab") == read_bytes(lb.last_checkpoint + ".vocab"));
    REQUIRE(la.steps.size() == lb.steps.size());
    for (size_t i = 0; i < la.steps.size(); ++i)
        CHECK(la.steps[i].total == lb.steps[i].total);
}

TEST_CASE("identical configs yield identical train logs") {
    MicroFixture fx("sncse_trainer_determinism", 32);
    RunConfig cfg = fx.base;
    cfg.loss_mode = LossMode::SNCSE;
    cfg.max_steps = 8;
    cfg.checkpoint_dir = (fx.dir / "d1").string();
    TrainLog l1 = sncse::train::train(cfg);
    cfg.checkpoint_dir = (fx.dir / "d2").string();
    TrainLog l2 = sncse::train::train(cfg);

    REQUIRE(l1.steps.size() == l2.steps.size());
    for (size_t i = 0; i < l1.steps.size(); ++i) {
        CHECK(l1.steps[i].total == l2.steps[i].total);
        CHECK(l1.steps[i].infonce == l2.steps[i].infonce);
        CHECK(l1.steps[i].bml == l2.steps[i].bml);
        CHECK(l1.steps[i].mean_delta == l2.steps[i].mean_delta);
    }
    REQUIRE(l1.evals.size() == l2.evals.size());
    for (size_t i = 0; i < l1.evals.size(); ++i)
        CHECK(l1.evals[i].dev_rho == l2.evals[i].dev_rho);
}

TEST_CASE("checkpoint save -> load -> eval reproduces the recorded dev rho") {
    MicroFixture fx("sncse_trainer_roundtrip", 32);
    RunConfig cfg = fx.base;
    cfg.loss_mode = LossMode::SNCSE;
    cfg.max_steps = 6;
    TrainLog log = sncse::train::train(cfg);
    REQUIRE(log.has_dev);
    REQUIRE(!log.best_checkpoint.empty());

    enc::Model model = enc::Model::load(log.best_checkpoint);
    auto sts = data::load_sts(cfg.sts_dir, {"toy"});
    auto report = eval::evaluate(model, sts, "dev");
    CHECK(std::abs(report.average_rho - log.best_dev_rho) < 1e-12);
}

TEST_CASE("each optimizer step decreases the loss on a frozen batch") {
    MicroFixture fx("sncse_trainer_descent", 16);
    auto pairs = data::load_pairs_tsv(fx.base.negations_path);
    pairs.resize(4);
    std::vector<std::string> lines;
    for (const auto& p : pairs) {
        lines.push_back(p.original);
        lines.push_back(p.negation);
    }
    enc::Vocabulary vocab = enc::Vocabulary::build(lines, 1);
    enc::EncoderDims dims = fx.base.arch;
    dims.vocab_size = vocab.size();
    enc::EncoderParams params = enc::EncoderParams::init(7, dims);

    auto batches = data::make_batches(pairs, vocab, fx.base.hyper, 99);
    REQUIRE(batches.size() == 1);

    num::AdamWConfig ocfg;
    ocfg.lr = 1e-3;
    num::AdamW opt(ocfg);

    RunConfig step_cfg = fx.base;
    step_cfg.loss_mode = LossMode::SNCSE;

    std::vector<double> losses;
    for (int s = 1; s <= 50; ++s) {
        num::Graph g;
        enc::BoundParams bound = enc::bind_params(g, params, true);
        std::vector<enc::TemplatedSequence> sx, sp, sn;
        std::vector<uint64_t> dx, dp, dn;
        for (const auto& t : batches[0].triplets) {
            sx.push_back(t.original);
            sp.push_back(t.positive);
            sn.push_back(t.soft_negative);
            dx.push_back(t.seed_original);
            dp.push_back(t.seed_positive);
            dn.push_back(num::mix(t.seed_positive, 1));
        }
        enc::EncodeOptions opt_x{true, false, 0.1, dx};
        enc::EncodeOptions opt_p{true, false, 0.1, dp};
        enc::EncodeOptions opt_n{true, false, 0.1, dn};
        auto* H = enc::encode_batch(g, bound, dims, sx, opt_x);
        auto* Hp = enc::encode_batch(g, bound, dims, sp, opt_p);
        auto* Hn = enc::encode_batch(g, bound, dims, sn, opt_n);
        auto* loss = obj::total_loss(g, obj::infonce_loss(g, H, Hp, 0.05),
                                     obj::bml_loss(g, obj::delta_col(g, H, Hp, Hn), 0.1, 0.3),
                                     1e-3);
        g.forward();
        g.backward(loss);
        losses.push_back(loss->val.item());

        opt.step_begin();
        params.for_each([&](const std::string& name, num::Tensor& t) {
            auto* node = bound.at(name);
            num::Tensor grad = node->grad.numel()
                                   ? node->grad
                                   : num::Tensor::zeros(t.rows(), t.cols());
            opt.update(name, t, grad);
        });
    }
    int increases = 0;
    for (size_t i = 1; i < losses.size(); ++i)
        if (losses[i] >= losses[i - 1]) ++increases;
    INFO("first " << losses.front() << " last " << losses.back() << " increases " << increases);
    CHECK(increases == 0);
    CHECK(losses.back() < losses.front());
}

TEST_CASE("config validation: negation file requirements and bad values") {
    MicroFixture fx("sncse_trainer_validation", 16);
    RunConfig cfg = fx.base;
    cfg.negations_path.clear();
    cfg.loss_mode = LossMode::SNCSE;
    CHECK_THROWS_AS(sncse::train::train(cfg), ConfigError);
    cfg.loss_mode = LossMode::PL;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.loss_mode = LossMode::NL;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.loss_mode = LossMode::InfoNCE;
    CHECK_NOTHROW(cfg.validate());

    RunConfig bad = fx.base;
    bad.eval_interval = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = fx.base;
    bad.hyper.tau = -0.1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    CHECK(loss_mode_from_string("sncse") == LossMode::SNCSE);
    CHECK(loss_mode_from_string("nl") == LossMode::NL);
    CHECK_THROWS_AS(loss_mode_from_string("bogus"), ConfigError);
}

TEST_CASE("NaN loss aborts with the step number") {
    MicroFixture fx("sncse_trainer_nan", 16);
    RunConfig cfg = fx.base;
    cfg.loss_mode = LossMode::SNCSE;
    cfg.hyper.lr = 1e30;
    cfg.grad_clip = 0.0;  // no clipping, let it blow up
    cfg.max_steps = 10;
    CHECK_THROWS_WITH_AS(sncse::train::train(cfg), doctest::Contains("aborted at step"), NumericError);
}

TEST_CASE("sweep: grid shape, labels, and 1x1x1 equivalence") {
    MicroFixture fx("sncse_trainer_sweep", 24);
    RunConfig base = fx.base;
    base.loss_mode = LossMode::SNCSE;
    base.max_steps = 3;

    auto grid = sweep(base, {0.1, 0.2}, {0.3, 2.0}, {1e-3}, 2);
    CHECK(grid.size() == 4);
    int flagged = 0;
    for (const auto& r : grid) {
        if (r.beta == 2.0) {
            CHECK(r.label == "upper difference ignored");
            ++flagged;
        } else {
            CHECK(r.label.empty());
        }
    }
    CHECK(flagged == 2);
    for (size_t i = 1; i < grid.size(); ++i) CHECK(grid[i - 1].dev_rho >= grid[i].dev_rho);

    auto single = sweep(base, {0.1}, {0.3}, {1e-3});
    REQUIRE(single.size() == 1);
    RunConfig direct = base;
    direct.hyper.alpha = 0.1;
    direct.hyper.beta = 0.3;
    direct.hyper.lambda = 1e-3;
    direct.checkpoint_dir = (fx.dir / "direct").string();
    TrainLog dl = sncse::train::train(direct);
    CHECK(single[0].dev_rho == dl.best_dev_rho);

    CHECK_THROWS_AS(sweep(base, {}, {0.3}, {1e-3}), ConfigError);
}

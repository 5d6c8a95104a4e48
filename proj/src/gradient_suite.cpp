#include "sncse/gradient_suite.hpp"

#include <cmath>

#include "sncse/encoder.hpp"
#include "sncse/grad_check.hpp"
#include "sncse/objectives.hpp"
#include "sncse/rng.hpp"

namespace sncse::num {

namespace {

Tensor random_embeddings(Rng& rng, int n, int d) {
    Tensor t = Tensor::zeros(n, d);
    for (double& x : t.values()) x = rng.normal();
    return t;
}

double plain_cos(const Tensor& A, int i, const Tensor& B, int j) {
    double dot = 0, na = 0, nb = 0;
    for (int k = 0; k < A.cols(); ++k) {
        dot += A.at(i, k) * B.at(j, k);
        na += A.at(i, k) * A.at(i, k);
        nb += B.at(j, k) * B.at(j, k);
    }
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

bool near_kink(const Tensor& H, const Tensor& Hp, const Tensor& Hn, double alpha, double beta) {
    for (int i = 0; i < H.rows(); ++i) {
        const double delta = plain_cos(H, i, Hn, i) - plain_cos(H, i, Hp, i);
        if (std::abs(delta + alpha) < 1e-3 || std::abs(delta + beta) < 1e-3) return true;
    }
    return false;
}

struct Triple {
    Tensor h, hp, hn;
};

Triple sample_triple(Rng& rng, double alpha, double beta) {
    for (;;) {
        const int n = 1 + static_cast<int>(rng.below(4));
        const int d = 3 + static_cast<int>(rng.below(6));
        Triple t{random_embeddings(rng, n, d), random_embeddings(rng, n, d),
                 random_embeddings(rng, n, d)};
        if (!near_kink(t.h, t.hp, t.hn, alpha, beta)) return t;
    }
}

double pipeline_check(Rng& rng) {
    using namespace sncse::enc;
    using namespace sncse::obj;

    EncoderDims dims;
    dims.vocab_size = 12;
    dims.d_model = 8;
    dims.n_heads = 2;
    dims.n_layers = 2;
    dims.ff_dim = 12;
    dims.max_len = 12;

    EncoderParams params = EncoderParams::init(rng.next_u64(), dims);
    std::vector<std::string> names;
    std::vector<Tensor> points;
    params.for_each([&](const std::string& name, Tensor& t) {
        names.push_back(name);
        points.push_back(t);
    });

    const int batch = 1 + static_cast<int>(rng.below(3));
    auto sample_batch = [&](int max_len) {
        std::vector<TemplatedSequence> seqs;
        for (int e = 0; e < batch; ++e) {
            TemplatedSequence s;
            const int len = 3 + static_cast<int>(rng.below(static_cast<uint64_t>(max_len - 3)));
            for (int i = 0; i < len; ++i)
                s.ids.push_back(3 + static_cast<int>(rng.below(dims.vocab_size - 3)));
            s.mask_pos = static_cast<int>(rng.below(len));
            seqs.push_back(std::move(s));
        }
        return seqs;
    };
    auto bx = sample_batch(8);
    auto bp_ = sample_batch(8);
    auto bn = sample_batch(8);

    EncodeOptions opt;
    opt.training = true;     // exercise the MLP readout
    opt.dropout_rate = 0.0;  // finite differences need a smooth objective

    return grad_check(
        [&](Graph& g, const std::vector<Node*>& leaves) {
            BoundParams bound;
            for (size_t i = 0; i < names.size(); ++i) bound.by_name[names[i]] = leaves[i];
            Node* H = encode_batch(g, bound, dims, bx, opt);
            Node* Hp = encode_batch(g, bound, dims, bp_, opt);
            Node* Hn = encode_batch(g, bound, dims, bn, opt);
            Node* inf = infonce_loss(g, H, Hp, 0.05);
            Node* bml = bml_loss(g, delta_col(g, H, Hp, Hn), 0.1, 0.3);
            return total_loss(g, inf, bml, 1e-3);
        },
        points);
}

}  // namespace

std::vector<GradSuiteEntry> run_gradient_suite(uint64_t seed, int trials) {
    using namespace sncse::obj;
    const double alpha = 0.1, beta = 0.3, tau = 0.05, lambda = 1e-3;

    std::vector<GradSuiteEntry> results = {
        {"infonce", 0.0}, {"bml", 0.0}, {"total", 0.0},
        {"pl", 0.0},      {"nl", 0.0},  {"encoder_pipeline", 0.0},
    };

    Rng rng(substream(seed, "gradsuite"));
    for (int t = 0; t < trials; ++t) {
        Triple tr = sample_triple(rng, alpha, beta);
        auto& [h, hp, hn] = tr;

        results[0].max_rel_err = std::max(
            results[0].max_rel_err,
            grad_check([&](Graph& g, const std::vector<Node*>& in) {
                return infonce_loss(g, in[0], in[1], tau);
            }, {h, hp}));
        results[1].max_rel_err = std::max(
            results[1].max_rel_err,
            grad_check([&](Graph& g, const std::vector<Node*>& in) {
                return bml_loss(g, delta_col(g, in[0], in[1], in[2]), alpha, beta);
            }, {h, hp, hn}));
        results[2].max_rel_err = std::max(
            results[2].max_rel_err,
            grad_check([&](Graph& g, const std::vector<Node*>& in) {
                Node* inf = infonce_loss(g, in[0], in[1], tau);
                Node* bml = bml_loss(g, delta_col(g, in[0], in[1], in[2]), alpha, beta);
                return total_loss(g, inf, bml, lambda);
            }, {h, hp, hn}));
        results[3].max_rel_err = std::max(
            results[3].max_rel_err,
            grad_check([&](Graph& g, const std::vector<Node*>& in) {
                return pl_loss(g, in[0], in[1], in[2], tau);
            }, {h, hp, hn}));
        results[4].max_rel_err = std::max(
            results[4].max_rel_err,
            grad_check([&](Graph& g, const std::vector<Node*>& in) {
                return nl_loss(g, in[0], in[1], in[2], tau);
            }, {h, hp, hn}));
        results[5].max_rel_err = std::max(results[5].max_rel_err, pipeline_check(rng));
    }
    return results;
}

}  // namespace sncse::num

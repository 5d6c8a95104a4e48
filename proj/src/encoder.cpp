#include "sncse/encoder.hpp"

#include <cmath>

#include "sncse/errors.hpp"
#include "sncse/rng.hpp"

namespace sncse::enc {

using num::mix;
using num::Rng;
using num::substream;

void EncoderDims::validate() const {
    if (vocab_size < 3) throw ConfigError("encoder: vocabulary too small");
    if (d_model <= 0 || n_heads <= 0 || n_layers <= 0 || ff_dim <= 0 || max_len <= 0)
        throw ConfigError("encoder: dimensions must be positive");
    if (d_model % n_heads != 0)
        throw ConfigError("encoder: d_model " + std::to_string(d_model) +
                          " not divisible by head count " + std::to_string(n_heads));
}

namespace {

Tensor uniform_init(Rng& rng, int rows, int cols, double bound) {
    Tensor t = Tensor::zeros(rows, cols);
    for (double& x : t.values()) x = rng.uniform(-bound, bound);
    return t;
}

Tensor normal_init(Rng& rng, int rows, int cols, double stddev) {
    Tensor t = Tensor::zeros(rows, cols);
    for (double& x : t.values()) x = rng.normal(0.0, stddev);
    return t;
}

}  // namespace

EncoderParams EncoderParams::init(uint64_t seed, EncoderDims dims) {
    dims.validate();
    Rng rng(substream(seed, "init"));
    EncoderParams p;
    p.dims = dims;
    const int d = dims.d_model;
    const double emb_bound = std::sqrt(3.0 / d);
    p.tok_emb = uniform_init(rng, dims.vocab_size, d, emb_bound);
    // Positions start near zero so token content dominates early training;
    // a large random positional basis would make any token insertion look
    // like a different sentence.
    p.pos_emb = uniform_init(rng, dims.max_len, d, 0.02);
    p.layers.resize(dims.n_layers);
    for (auto& l : p.layers) {
        const double w_std = 1.0 / std::sqrt(static_cast<double>(d));
        l.wq = normal_init(rng, d, d, w_std);
        l.bq = Tensor::zeros(1, d);
        l.wk = normal_init(rng, d, d, w_std);
        l.bk = Tensor::zeros(1, d);
        l.wv = normal_init(rng, d, d, w_std);
        l.bv = Tensor::zeros(1, d);
        l.wo = normal_init(rng, d, d, w_std);
        l.bo = Tensor::zeros(1, d);
        l.w1 = normal_init(rng, d, dims.ff_dim, w_std);
        l.b1 = Tensor::zeros(1, dims.ff_dim);
        l.w2 = normal_init(rng, dims.ff_dim, d, 1.0 / std::sqrt(static_cast<double>(dims.ff_dim)));
        l.b2 = Tensor::zeros(1, d);
    }
    p.mlp_w = normal_init(rng, d, d, 1.0 / std::sqrt(static_cast<double>(d)));
    p.mlp_b = Tensor::zeros(1, d);
    return p;
}

void EncoderParams::for_each(const std::function<void(const std::string&, Tensor&)>& fn) {
    fn("tok_emb", tok_emb);
    fn("pos_emb", pos_emb);
    for (size_t i = 0; i < layers.size(); ++i) {
        const std::string pre = "layer" + std::to_string(i) + ".";
        LayerParams& l = layers[i];
        fn(pre + "wq", l.wq);
        fn(pre + "bq", l.bq);
        fn(pre + "wk", l.wk);
        fn(pre + "bk", l.bk);
        fn(pre + "wv", l.wv);
        fn(pre + "bv", l.bv);
        fn(pre + "wo", l.wo);
        fn(pre + "bo", l.bo);
        fn(pre + "w1", l.w1);
        fn(pre + "b1", l.b1);
        fn(pre + "w2", l.w2);
        fn(pre + "b2", l.b2);
    }
    fn("mlp.w", mlp_w);
    fn("mlp.b", mlp_b);
}

void EncoderParams::for_each(
    const std::function<void(const std::string&, const Tensor&)>& fn) const {
    const_cast<EncoderParams*>(this)->for_each(
        [&](const std::string& name, Tensor& t) { fn(name, t); });
}

std::map<std::string, Tensor> EncoderParams::to_tensors() const {
    std::map<std::string, Tensor> table;
    for_each([&](const std::string& name, const Tensor& t) { table.emplace(name, t); });
    return table;
}

EncoderParams EncoderParams::from_tensors(const EncoderDims& dims,
                                          const std::map<std::string, Tensor>& table) {
    EncoderParams p = EncoderParams::init(0, dims);  // shapes, then overwrite
    p.for_each([&](const std::string& name, Tensor& t) {
        auto it = table.find(name);
        if (it == table.end()) throw DataError("checkpoint missing parameter '" + name + "'");
        if (!(it->second.shape() == t.shape()))
            throw DataError("checkpoint parameter '" + name + "' has shape " +
                            it->second.shape_str() + ", expected " + t.shape_str());
        t = it->second;
    });
    return p;
}

Node* BoundParams::at(const std::string& name) const {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw ContractError("unbound parameter '" + name + "'");
    return it->second;
}

BoundParams bind_params(Graph& g, const EncoderParams& params, bool trainable) {
    BoundParams bp;
    params.for_each([&](const std::string& name, const Tensor& t) {
        bp.by_name[name] = g.param(&t, name, trainable);
    });
    return bp;
}

Node* encode_batch(Graph& g, const BoundParams& bp, const EncoderDims& dims,
                   const std::vector<TemplatedSequence>& batch, const EncodeOptions& opt) {
    if (batch.empty()) throw InputError("encode: empty batch");
    const bool use_dropout = opt.training && opt.dropout_rate > 0.0;
    if (use_dropout && opt.seeds.size() != batch.size())
        throw ContractError("encode: one dropout seed required per sequence");

    int t_max = 0;
    for (const auto& seq : batch) {
        const int len = static_cast<int>(seq.ids.size());
        if (len == 0) throw InputError("encode: empty sequence");
        if (len > dims.max_len)
            throw InputError("encode: sequence length " + std::to_string(len) +
                             " exceeds max_len " + std::to_string(dims.max_len));
        if (seq.mask_pos < 0 || seq.mask_pos >= len)
            throw ContractError("encode: mask position " + std::to_string(seq.mask_pos) +
                                " outside sequence of length " + std::to_string(len));
        t_max = std::max(t_max, len);
    }

    const int d = dims.d_model;
    const int dh = d / dims.n_heads;
    const double attn_scale = 1.0 / std::sqrt(static_cast<double>(dh));

    Node* H = nullptr;
    for (size_t e = 0; e < batch.size(); ++e) {
        const auto& seq = batch[e];
        const int len = static_cast<int>(seq.ids.size());

        std::vector<int> padded(seq.ids);
        padded.resize(t_max, Vocabulary::kPad);

        // Additive key mask: padded positions never receive attention.
        Tensor mask_row = Tensor::zeros(1, t_max);
        for (int j = len; j < t_max; ++j) mask_row.at(0, j) = -1e9;
        Node* mask = g.constant(std::move(mask_row), "pad_mask");

        int site = 0;
        auto maybe_dropout = [&](Node* x) {
            if (!use_dropout) return x;
            return g.dropout(x, opt.dropout_rate, mix(opt.seeds[e], site++));
        };

        Node* x = g.gather(bp.at("tok_emb"), padded);
        x = g.add(x, g.slice_rows(bp.at("pos_emb"), 0, t_max));
        x = maybe_dropout(x);

        for (int l = 0; l < dims.n_layers; ++l) {
            const std::string pre = "layer" + std::to_string(l) + ".";
            Node* q = g.add_row(g.matmul(x, bp.at(pre + "wq")), bp.at(pre + "bq"));
            Node* k = g.add_row(g.matmul(x, bp.at(pre + "wk")), bp.at(pre + "bk"));
            Node* v = g.add_row(g.matmul(x, bp.at(pre + "wv")), bp.at(pre + "bv"));

            Node* ctx = nullptr;
            for (int h = 0; h < dims.n_heads; ++h) {
                Node* qh = g.slice(q, 0, t_max, h * dh, (h + 1) * dh);
                Node* kh = g.slice(k, 0, t_max, h * dh, (h + 1) * dh);
                Node* vh = g.slice(v, 0, t_max, h * dh, (h + 1) * dh);
                Node* scores = g.scale(g.matmul(qh, g.transpose(kh)), attn_scale);
                scores = g.add_row(scores, mask);
                Node* attn = g.softmax_rows(scores);
                Node* ch = g.matmul(attn, vh);
                ctx = ctx ? g.concat_cols(ctx, ch) : ch;
            }

            Node* out = g.add_row(g.matmul(ctx, bp.at(pre + "wo")), bp.at(pre + "bo"));
            x = g.add(x, maybe_dropout(out));

            Node* ff = g.relu(g.add_row(g.matmul(x, bp.at(pre + "w1")), bp.at(pre + "b1")));
            ff = g.add_row(g.matmul(ff, bp.at(pre + "w2")), bp.at(pre + "b2"));
            x = g.add(x, maybe_dropout(ff));
        }

        Node* h_mask = g.slice(x, seq.mask_pos, seq.mask_pos + 1, 0, d);
        H = H ? g.concat_rows(H, h_mask) : h_mask;
    }

    if (opt.training || opt.keep_mlp)
        H = g.tanh(g.add_row(g.matmul(H, bp.at("mlp.w")), bp.at("mlp.b")));
    return H;
}

}  // namespace sncse::enc

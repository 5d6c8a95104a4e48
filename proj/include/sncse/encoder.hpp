#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sncse/graph.hpp"
#include "sncse/vocab.hpp"

namespace sncse::enc {

using num::Graph;
using num::Node;
using num::Tensor;

struct EncoderDims {
    int vocab_size = 0;
    int d_model = 64;
    int n_heads = 4;
    int n_layers = 2;
    int ff_dim = 128;
    int max_len = 64;

    void validate() const;
};

struct LayerParams {
    Tensor wq, bq, wk, bk, wv, bv, wo, bo;  // attention projections
    Tensor w1, b1, w2, b2;                  // position-wise feed-forward
};

struct EncoderParams {
    EncoderDims dims;
    Tensor tok_emb;  // [vocab, d]
    Tensor pos_emb;  // [max_len, d], learned
    std::vector<LayerParams> layers;
    Tensor mlp_w, mlp_b;  // mask-slot readout, d -> d

    // Deterministic init: scaled uniform embeddings, scaled normal weights.
    static EncoderParams init(uint64_t seed, EncoderDims dims);

    void for_each(const std::function<void(const std::string&, Tensor&)>& fn);
    void for_each(const std::function<void(const std::string&, const Tensor&)>& fn) const;

    std::map<std::string, Tensor> to_tensors() const;
    static EncoderParams from_tensors(const EncoderDims& dims,
                                      const std::map<std::string, Tensor>& table);
};

// Parameter leaves bound into one graph instance.
struct BoundParams {
    std::map<std::string, Node*> by_name;
    Node* at(const std::string& name) const;
};

BoundParams bind_params(Graph& g, const EncoderParams& params, bool trainable);

struct EncodeOptions {
    bool training = false;
    bool keep_mlp = false;  // force the training-path readout at evaluation time
    double dropout_rate = 0.0;
    std::vector<uint64_t> seeds;  // one per sequence, consumed only when training
};

// Sequences padded to the batch max; attention masked over padding; returns
// the [N, d] matrix of sentence embeddings. Training applies the Tanh(MLP(.))
// readout on the mask-slot hidden state; evaluation bypasses the MLP unless
// keep_mlp is set.
Node* encode_batch(Graph& g, const BoundParams& bp, const EncoderDims& dims,
                   const std::vector<TemplatedSequence>& batch, const EncodeOptions& opt);

}  // namespace sncse::enc

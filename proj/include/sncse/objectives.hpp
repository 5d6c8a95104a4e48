#pragma once

#include <cstdint>
#include <vector>

#include "sncse/graph.hpp"

namespace sncse::obj {

using num::Graph;
using num::Node;
using num::Tensor;

// Shared knobs for training and the losses. Defaults follow the reference
// configuration: tau 0.05, margins [0.1, 0.3], lambda 1e-3, seed 42.
struct Hyperparams {
    double tau = 0.05;
    double alpha = 0.1;
    double beta = 0.3;
    double lambda = 1e-3;
    int batch_size = 16;
    double dropout = 0.1;
    double lr = 1e-3;
    uint64_t seed = 42;

    void validate() const;
};

struct LossBreakdown {
    double infonce = 0.0;
    std::vector<double> deltas;
    double bml = 0.0;
    double total = 0.0;
};

// Plain cosine for evaluation paths; the graph node version carries gradients.
double cosine(const std::vector<double>& u, const std::vector<double>& v);

// InfoNCE over a batch: mean_i -log( e^{cos(h_i,h_i+)/tau} / sum_j e^{cos(h_i,h_j+)/tau} ).
// The denominator runs over every positive in the batch, including j = i.
Node* infonce_loss(Graph& g, Node* H, Node* Hp, double tau);

// Per-example similarity gap, cos(h, h#) - cos(h, h+), as an [N,1] column.
Node* delta_col(Graph& g, Node* H, Node* Hp, Node* Hn);

// Bidirectional margin penalty: mean of ReLU(d + alpha) + ReLU(-d - beta),
// zero exactly when every gap lies in [-beta, -alpha].
Node* bml_loss(Graph& g, Node* delta, double alpha, double beta);

Node* total_loss(Graph& g, Node* infonce, Node* bml, double lambda);

// Negation treated as a second positive: two stacked InfoNCE terms.
Node* pl_loss(Graph& g, Node* H, Node* Hp, Node* Hn, double tau);

// Negation treated as a pure negative: the InfoNCE denominator gains the
// e^{cos(h_i, h_i#)/tau} term.
Node* nl_loss(Graph& g, Node* H, Node* Hp, Node* Hn, double tau);

}  // namespace sncse::obj

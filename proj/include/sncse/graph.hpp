#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "sncse/tensor.hpp"

namespace sncse::num {

enum class Op {
    Leaf,
    MatMul,
    Transpose,
    Add,
    AddRow,   // [m,n] + [1,n] broadcast over rows
    Mul,      // elementwise
    Scale,    // x * c
    AddConst, // x + c
    Tanh,
    Relu,
    SoftmaxRows,
    LogSumExpRows,  // [m,n] -> [m,1]
    DiagCol,        // [m,m] -> [m,1]
    Gather,         // table[V,d] indexed by row ids -> [n,d]
    Dropout,        // inverted dropout, stateless per-element hash of (seed, index)
    ConcatRows,
    ConcatCols,
    Slice,          // rows [r0,r1) x cols [c0,c1)
    MeanAll,        // [m,n] -> [1,1]
    CosineRows,     // A[m,d], B[n,d] -> [m,n] of cosine similarities
};

const char* op_name(Op op);

struct Node {
    Op op = Op::Leaf;
    int id = -1;
    std::vector<Node*> in;
    Tensor val;
    Tensor grad;
    bool requires_grad = false;
    bool has_val = false;

    // Op-specific parameters.
    double c = 0.0;
    int r0 = 0, r1 = 0, c0 = 0, c1 = 0;
    std::vector<int> ids;
    double rate = 0.0;
    uint64_t seed = 0;
    const Tensor* bound = nullptr;  // leaf bound to external storage
    std::string name;
};

// Two-phase dataflow graph: construct nodes (topological by construction),
// then forward() computes values and backward() accumulates gradients.
// forward() may be called repeatedly; bound leaves re-read their storage,
// which is what the finite-difference checker relies on.
class Graph {
public:
    Node* leaf(Tensor t, const std::string& name = "");
    Node* param(const Tensor* storage, const std::string& name, bool trainable = true);
    Node* constant(Tensor t, const std::string& name = "");

    Node* matmul(Node* a, Node* b);
    Node* transpose(Node* a);
    Node* add(Node* a, Node* b);
    Node* add_row(Node* a, Node* row);
    Node* mul(Node* a, Node* b);
    Node* scale(Node* a, double c);
    Node* add_const(Node* a, double c);
    Node* sub(Node* a, Node* b) { return add(a, scale(b, -1.0)); }
    Node* tanh(Node* a);
    Node* relu(Node* a);
    Node* softmax_rows(Node* a);
    Node* logsumexp_rows(Node* a);
    Node* diag_col(Node* a);
    Node* gather(Node* table, std::vector<int> row_ids);
    Node* dropout(Node* a, double rate, uint64_t seed);
    Node* concat_rows(Node* a, Node* b);
    Node* concat_cols(Node* a, Node* b);
    Node* slice(Node* a, int r0, int r1, int c0, int c1);
    Node* slice_rows(Node* a, int r0, int r1);
    Node* mean_all(Node* a);
    Node* cosine_rows(Node* a, Node* b);

    // Executes every node in construction order. Fails fast on NaN with the
    // offending node identified.
    void forward();

    // Seeds d(out)/d(out) = 1 for a scalar output (or the given seed tensor)
    // and accumulates gradients into every node with requires_grad.
    void backward(Node* out);
    void backward(Node* out, const Tensor& seed_grad);

    size_t size() const { return nodes_.size(); }

private:
    Node* make(Op op, std::vector<Node*> in);
    void compute(Node& n);
    void backprop(Node& n);
    void check_finite(const Node& n) const;
    static void accumulate(Node* dst, const Tensor& g);

    std::deque<Node> nodes_;
    bool forwarded_ = false;
};

}  // namespace sncse::num

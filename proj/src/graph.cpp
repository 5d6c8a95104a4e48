#include "sncse/graph.hpp"

#include <algorithm>
#include <cmath>

#include "sncse/rng.hpp"

namespace sncse::num {

const char* op_name(Op op) {
    switch (op) {
        case Op::Leaf: return "leaf";
        case Op::MatMul: return "matmul";
        case Op::Transpose: return "transpose";
        case Op::Add: return "add";
        case Op::AddRow: return "add_row";
        case Op::Mul: return "mul";
        case Op::Scale: return "scale";
        case Op::AddConst: return "add_const";
        case Op::Tanh: return "tanh";
        case Op::Relu: return "relu";
        case Op::SoftmaxRows: return "softmax_rows";
        case Op::LogSumExpRows: return "logsumexp_rows";
        case Op::DiagCol: return "diag_col";
        case Op::Gather: return "gather";
        case Op::Dropout: return "dropout";
        case Op::ConcatRows: return "concat_rows";
        case Op::ConcatCols: return "concat_cols";
        case Op::Slice: return "slice";
        case Op::MeanAll: return "mean_all";
        case Op::CosineRows: return "cosine_rows";
    }
    return "?";
}

namespace {

std::string describe(const Node& n) {
    std::string s = "node #" + std::to_string(n.id) + " (" + op_name(n.op);
    if (!n.name.empty()) s += " '" + n.name + "'";
    return s + ")";
}

void require_matrix(const Node* n, const char* who) {
    if (!n->val.is_matrix())
        throw DimError(std::string(who) + ": expected rank-2 operand, got " + n->val.shape_str());
}

}  // namespace

Node* Graph::make(Op op, std::vector<Node*> in) {
    nodes_.emplace_back();
    Node& n = nodes_.back();
    n.op = op;
    n.id = static_cast<int>(nodes_.size()) - 1;
    n.in = std::move(in);
    for (Node* p : n.in)
        if (p->requires_grad) n.requires_grad = true;
    return &n;
}

Node* Graph::leaf(Tensor t, const std::string& name) {
    Node* n = make(Op::Leaf, {});
    n->val = std::move(t);
    n->name = name;
    return n;
}

Node* Graph::param(const Tensor* storage, const std::string& name, bool trainable) {
    Node* n = make(Op::Leaf, {});
    n->bound = storage;
    n->val = *storage;
    n->name = name;
    n->requires_grad = trainable;
    return n;
}

Node* Graph::constant(Tensor t, const std::string& name) { return leaf(std::move(t), name); }

Node* Graph::matmul(Node* a, Node* b) {
    require_matrix(a, "matmul");
    require_matrix(b, "matmul");
    if (a->val.cols() != b->val.rows())
        throw DimError("matmul: inner dimensions disagree, " + a->val.shape_str() + " x " +
                       b->val.shape_str());
    Node* n = make(Op::MatMul, {a, b});
    n->val = Tensor::zeros(a->val.rows(), b->val.cols());
    return n;
}

Node* Graph::transpose(Node* a) {
    require_matrix(a, "transpose");
    Node* n = make(Op::Transpose, {a});
    n->val = Tensor::zeros(a->val.cols(), a->val.rows());
    return n;
}

Node* Graph::add(Node* a, Node* b) {
    require_matrix(a, "add");
    require_matrix(b, "add");
    if (!a->val.same_shape(b->val))
        throw DimError("add: shape mismatch " + a->val.shape_str() + " vs " + b->val.shape_str());
    Node* n = make(Op::Add, {a, b});
    n->val = Tensor::zeros(a->val.rows(), a->val.cols());
    return n;
}

Node* Graph::add_row(Node* a, Node* row) {
    require_matrix(a, "add_row");
    require_matrix(row, "add_row");
    if (row->val.rows() != 1 || row->val.cols() != a->val.cols())
        throw DimError("add_row: row vector " + row->val.shape_str() + " does not match " +
                       a->val.shape_str());
    Node* n = make(Op::AddRow, {a, row});
    n->val = Tensor::zeros(a->val.rows(), a->val.cols());
    return n;
}

Node* Graph::mul(Node* a, Node* b) {
    require_matrix(a, "mul");
    require_matrix(b, "mul");
    if (!a->val.same_shape(b->val))
        throw DimError("mul: shape mismatch " + a->val.shape_str() + " vs " + b->val.shape_str());
    Node* n = make(Op::Mul, {a, b});
    n->val = Tensor::zeros(a->val.rows(), a->val.cols());
    return n;
}

Node* Graph::scale(Node* a, double c) {
    require_matrix(a, "scale");
    Node* n = make(Op::Scale, {a});
    n->c = c;
    n->val = Tensor::zeros(a->val.rows(), a->val.cols());
    return n;
}

Node* Graph::add_const(Node* a, double c) {
    require_matrix(a, "add_const");
    Node* n = make(Op::AddConst, {a});
    n->c = c;
    n->val = Tensor::zeros(a->val.rows(), a->val.cols());
    return n;
}

Node* Graph::tanh(Node* a) {
    require_matrix(a, "tanh");
    Node* n = make(Op::Tanh, {a});
    n->val = Tensor::zeros(a->val.rows(), a->val.cols());
    return n;
}

Node* Graph::relu(Node* a) {
    require_matrix(a, "relu");
    Node* n = make(Op::Relu, {a});
    n->val = Tensor::zeros(a->val.rows(), a->val.cols());
    return n;
}

Node* Graph::softmax_rows(Node* a) {
    require_matrix(a, "softmax_rows");
    Node* n = make(Op::SoftmaxRows, {a});
    n->val = Tensor::zeros(a->val.rows(), a->val.cols());
    return n;
}

Node* Graph::logsumexp_rows(Node* a) {
    require_matrix(a, "logsumexp_rows");
    Node* n = make(Op::LogSumExpRows, {a});
    n->val = Tensor::zeros(a->val.rows(), 1);
    return n;
}

Node* Graph::diag_col(Node* a) {
    require_matrix(a, "diag_col");
    if (a->val.rows() != a->val.cols())
        throw DimError("diag_col: matrix not square, " + a->val.shape_str());
    Node* n = make(Op::DiagCol, {a});
    n->val = Tensor::zeros(a->val.rows(), 1);
    return n;
}

Node* Graph::gather(Node* table, std::vector<int> row_ids) {
    require_matrix(table, "gather");
    for (int id : row_ids)
        if (id < 0 || id >= table->val.rows())
            throw DimError("gather: row id " + std::to_string(id) + " outside table " +
                           table->val.shape_str());
    Node* n = make(Op::Gather, {table});
    n->ids = std::move(row_ids);
    n->val = Tensor::zeros(static_cast<int>(n->ids.size()), table->val.cols());
    return n;
}

Node* Graph::dropout(Node* a, double rate, uint64_t seed) {
    require_matrix(a, "dropout");
    if (rate < 0.0 || rate >= 1.0) throw ConfigError("dropout: rate must be in [0, 1)");
    Node* n = make(Op::Dropout, {a});
    n->rate = rate;
    n->seed = seed;
    n->val = Tensor::zeros(a->val.rows(), a->val.cols());
    return n;
}

Node* Graph::concat_rows(Node* a, Node* b) {
    require_matrix(a, "concat_rows");
    require_matrix(b, "concat_rows");
    if (a->val.cols() != b->val.cols())
        throw DimError("concat_rows: column counts differ, " + a->val.shape_str() + " vs " +
                       b->val.shape_str());
    Node* n = make(Op::ConcatRows, {a, b});
    n->val = Tensor::zeros(a->val.rows() + b->val.rows(), a->val.cols());
    return n;
}

Node* Graph::concat_cols(Node* a, Node* b) {
    require_matrix(a, "concat_cols");
    require_matrix(b, "concat_cols");
    if (a->val.rows() != b->val.rows())
        throw DimError("concat_cols: row counts differ, " + a->val.shape_str() + " vs " +
                       b->val.shape_str());
    Node* n = make(Op::ConcatCols, {a, b});
    n->val = Tensor::zeros(a->val.rows(), a->val.cols() + b->val.cols());
    return n;
}

Node* Graph::slice(Node* a, int r0, int r1, int c0, int c1) {
    require_matrix(a, "slice");
    if (r0 < 0 || r1 > a->val.rows() || r0 >= r1 || c0 < 0 || c1 > a->val.cols() || c0 >= c1)
        throw DimError("slice: range [" + std::to_string(r0) + "," + std::to_string(r1) + ")x[" +
                       std::to_string(c0) + "," + std::to_string(c1) + ") invalid for " +
                       a->val.shape_str());
    Node* n = make(Op::Slice, {a});
    n->r0 = r0;
    n->r1 = r1;
    n->c0 = c0;
    n->c1 = c1;
    n->val = Tensor::zeros(r1 - r0, c1 - c0);
    return n;
}

Node* Graph::slice_rows(Node* a, int r0, int r1) { return slice(a, r0, r1, 0, a->val.cols()); }

Node* Graph::mean_all(Node* a) {
    require_matrix(a, "mean_all");
    if (a->val.numel() == 0) throw DimError("mean_all: empty tensor");
    Node* n = make(Op::MeanAll, {a});
    n->val = Tensor::zeros(1, 1);
    return n;
}

Node* Graph::cosine_rows(Node* a, Node* b) {
    require_matrix(a, "cosine_rows");
    require_matrix(b, "cosine_rows");
    if (a->val.cols() != b->val.cols())
        throw DimError("cosine_rows: dims differ, " + a->val.shape_str() + " vs " +
                       b->val.shape_str());
    Node* n = make(Op::CosineRows, {a, b});
    n->val = Tensor::zeros(a->val.rows(), b->val.rows());
    return n;
}

void Graph::check_finite(const Node& n) const {
    for (double x : n.val.values())
        if (std::isnan(x)) throw NumericError("NaN produced at " + describe(n));
}

namespace {

double row_norm(const Tensor& t, int i) {
    double s = 0.0;
    for (int j = 0; j < t.cols(); ++j) s += t.at(i, j) * t.at(i, j);
    return std::sqrt(s);
}

}  // namespace

void Graph::compute(Node& n) {
    switch (n.op) {
        case Op::Leaf:
            if (n.bound) n.val = *n.bound;
            break;
        case Op::MatMul: {
            const Tensor& A = n.in[0]->val;
            const Tensor& B = n.in[1]->val;
            const int m = A.rows(), k = A.cols(), p = B.cols();
            n.val.fill(0.0);
            for (int i = 0; i < m; ++i)
                for (int kk = 0; kk < k; ++kk) {
                    const double a = A.at(i, kk);
                    const double* brow = B.data() + static_cast<size_t>(kk) * p;
                    double* crow = n.val.data() + static_cast<size_t>(i) * p;
                    for (int j = 0; j < p; ++j) crow[j] += a * brow[j];
                }
            break;
        }
        case Op::Transpose: {
            const Tensor& A = n.in[0]->val;
            for (int i = 0; i < A.rows(); ++i)
                for (int j = 0; j < A.cols(); ++j) n.val.at(j, i) = A.at(i, j);
            break;
        }
        case Op::Add: {
            const auto& a = n.in[0]->val.values();
            const auto& b = n.in[1]->val.values();
            auto& o = n.val.values();
            for (size_t i = 0; i < o.size(); ++i) o[i] = a[i] + b[i];
            break;
        }
        case Op::AddRow: {
            const Tensor& A = n.in[0]->val;
            const Tensor& r = n.in[1]->val;
            for (int i = 0; i < A.rows(); ++i)
                for (int j = 0; j < A.cols(); ++j) n.val.at(i, j) = A.at(i, j) + r.at(0, j);
            break;
        }
        case Op::Mul: {
            const auto& a = n.in[0]->val.values();
            const auto& b = n.in[1]->val.values();
            auto& o = n.val.values();
            for (size_t i = 0; i < o.size(); ++i) o[i] = a[i] * b[i];
            break;
        }
        case Op::Scale: {
            const auto& a = n.in[0]->val.values();
            auto& o = n.val.values();
            for (size_t i = 0; i < o.size(); ++i) o[i] = a[i] * n.c;
            break;
        }
        case Op::AddConst: {
            const auto& a = n.in[0]->val.values();
            auto& o = n.val.values();
            for (size_t i = 0; i < o.size(); ++i) o[i] = a[i] + n.c;
            break;
        }
        case Op::Tanh: {
            const auto& a = n.in[0]->val.values();
            auto& o = n.val.values();
            for (size_t i = 0; i < o.size(); ++i) o[i] = std::tanh(a[i]);
            break;
        }
        case Op::Relu: {
            const auto& a = n.in[0]->val.values();
            auto& o = n.val.values();
            for (size_t i = 0; i < o.size(); ++i) o[i] = a[i] > 0.0 ? a[i] : 0.0;
            break;
        }
        case Op::SoftmaxRows: {
            const Tensor& A = n.in[0]->val;
            for (int i = 0; i < A.rows(); ++i) {
                double mx = A.at(i, 0);
                for (int j = 1; j < A.cols(); ++j) mx = std::max(mx, A.at(i, j));
                double sum = 0.0;
                for (int j = 0; j < A.cols(); ++j) {
                    double e = std::exp(A.at(i, j) - mx);
                    n.val.at(i, j) = e;
                    sum += e;
                }
                for (int j = 0; j < A.cols(); ++j) n.val.at(i, j) /= sum;
            }
            break;
        }
        case Op::LogSumExpRows: {
            const Tensor& A = n.in[0]->val;
            for (int i = 0; i < A.rows(); ++i) {
                double mx = A.at(i, 0);
                for (int j = 1; j < A.cols(); ++j) mx = std::max(mx, A.at(i, j));
                double sum = 0.0;
                for (int j = 0; j < A.cols(); ++j) sum += std::exp(A.at(i, j) - mx);
                n.val.at(i, 0) = mx + std::log(sum);
            }
            break;
        }
        case Op::DiagCol: {
            const Tensor& A = n.in[0]->val;
            for (int i = 0; i < A.rows(); ++i) n.val.at(i, 0) = A.at(i, i);
            break;
        }
        case Op::Gather: {
            const Tensor& T = n.in[0]->val;
            for (size_t r = 0; r < n.ids.size(); ++r)
                for (int j = 0; j < T.cols(); ++j)
                    n.val.at(static_cast<int>(r), j) = T.at(n.ids[r], j);
            break;
        }
        case Op::Dropout: {
            const auto& a = n.in[0]->val.values();
            auto& o = n.val.values();
            if (n.rate == 0.0) {
                o = a;
            } else {
                const double keep_scale = 1.0 / (1.0 - n.rate);
                for (size_t i = 0; i < o.size(); ++i) {
                    bool keep = to_unit(elem_hash(n.seed, i)) >= n.rate;
                    o[i] = keep ? a[i] * keep_scale : 0.0;
                }
            }
            break;
        }
        case Op::ConcatRows: {
            const Tensor& A = n.in[0]->val;
            const Tensor& B = n.in[1]->val;
            for (int i = 0; i < A.rows(); ++i)
                for (int j = 0; j < A.cols(); ++j) n.val.at(i, j) = A.at(i, j);
            for (int i = 0; i < B.rows(); ++i)
                for (int j = 0; j < B.cols(); ++j) n.val.at(A.rows() + i, j) = B.at(i, j);
            break;
        }
        case Op::ConcatCols: {
            const Tensor& A = n.in[0]->val;
            const Tensor& B = n.in[1]->val;
            for (int i = 0; i < A.rows(); ++i) {
                for (int j = 0; j < A.cols(); ++j) n.val.at(i, j) = A.at(i, j);
                for (int j = 0; j < B.cols(); ++j) n.val.at(i, A.cols() + j) = B.at(i, j);
            }
            break;
        }
        case Op::Slice: {
            const Tensor& A = n.in[0]->val;
            for (int i = n.r0; i < n.r1; ++i)
                for (int j = n.c0; j < n.c1; ++j) n.val.at(i - n.r0, j - n.c0) = A.at(i, j);
            break;
        }
        case Op::MeanAll: {
            const auto& a = n.in[0]->val.values();
            double s = 0.0;
            for (double x : a) s += x;
            n.val.at(0, 0) = s / static_cast<double>(a.size());
            break;
        }
        case Op::CosineRows: {
            const Tensor& A = n.in[0]->val;
            const Tensor& B = n.in[1]->val;
            const int d = A.cols();
            for (int i = 0; i < A.rows(); ++i) {
                double na = row_norm(A, i);
                if (na <= 1e-12)
                    throw DegenerateInputError("cosine_rows: left row " + std::to_string(i) +
                                               " has near-zero norm");
                for (int j = 0; j < B.rows(); ++j) {
                    double nb = row_norm(B, j);
                    if (nb <= 1e-12)
                        throw DegenerateInputError("cosine_rows: right row " + std::to_string(j) +
                                                   " has near-zero norm");
                    double dot = 0.0;
                    for (int k = 0; k < d; ++k) dot += A.at(i, k) * B.at(j, k);
                    n.val.at(i, j) = dot / (na * nb);
                }
            }
            break;
        }
    }
    n.has_val = true;
    check_finite(n);
}

void Graph::forward() {
    for (Node& n : nodes_) compute(n);
    forwarded_ = true;
}

void Graph::accumulate(Node* dst, const Tensor& g) {
    if (!dst->requires_grad) return;
    if (dst->grad.numel() == 0) dst->grad = Tensor::zeros(dst->val.rows(), dst->val.cols());
    auto& acc = dst->grad.values();
    const auto& src = g.values();
    for (size_t i = 0; i < acc.size(); ++i) acc[i] += src[i];
}

void Graph::backprop(Node& n) {
    if (n.grad.numel() == 0) return;  // no gradient flowed into this node
    const Tensor& g = n.grad;
    switch (n.op) {
        case Op::Leaf:
            break;
        case Op::MatMul: {
            Node* A = n.in[0];
            Node* B = n.in[1];
            if (A->requires_grad) {
                Tensor ga = Tensor::zeros(A->val.rows(), A->val.cols());
                // gA = g * B^T
                for (int i = 0; i < ga.rows(); ++i)
                    for (int j = 0; j < ga.cols(); ++j) {
                        double s = 0.0;
                        for (int k = 0; k < g.cols(); ++k) s += g.at(i, k) * B->val.at(j, k);
                        ga.at(i, j) = s;
                    }
                accumulate(A, ga);
            }
            if (B->requires_grad) {
                Tensor gb = Tensor::zeros(B->val.rows(), B->val.cols());
                // gB = A^T * g
                for (int i = 0; i < gb.rows(); ++i)
                    for (int j = 0; j < gb.cols(); ++j) {
                        double s = 0.0;
                        for (int k = 0; k < A->val.rows(); ++k)
                            s += A->val.at(k, i) * g.at(k, j);
                        gb.at(i, j) = s;
                    }
                accumulate(B, gb);
            }
            break;
        }
        case Op::Transpose: {
            Tensor ga = Tensor::zeros(n.val.cols(), n.val.rows());
            for (int i = 0; i < g.rows(); ++i)
                for (int j = 0; j < g.cols(); ++j) ga.at(j, i) = g.at(i, j);
            accumulate(n.in[0], ga);
            break;
        }
        case Op::Add:
            accumulate(n.in[0], g);
            accumulate(n.in[1], g);
            break;
        case Op::AddRow: {
            accumulate(n.in[0], g);
            if (n.in[1]->requires_grad) {
                Tensor gr = Tensor::zeros(1, g.cols());
                for (int i = 0; i < g.rows(); ++i)
                    for (int j = 0; j < g.cols(); ++j) gr.at(0, j) += g.at(i, j);
                accumulate(n.in[1], gr);
            }
            break;
        }
        case Op::Mul: {
            if (n.in[0]->requires_grad) {
                Tensor ga = g;
                auto& o = ga.values();
                const auto& b = n.in[1]->val.values();
                for (size_t i = 0; i < o.size(); ++i) o[i] *= b[i];
                accumulate(n.in[0], ga);
            }
            if (n.in[1]->requires_grad) {
                Tensor gb = g;
                auto& o = gb.values();
                const auto& a = n.in[0]->val.values();
                for (size_t i = 0; i < o.size(); ++i) o[i] *= a[i];
                accumulate(n.in[1], gb);
            }
            break;
        }
        case Op::Scale: {
            Tensor ga = g;
            for (double& x : ga.values()) x *= n.c;
            accumulate(n.in[0], ga);
            break;
        }
        case Op::AddConst:
            accumulate(n.in[0], g);
            break;
        case Op::Tanh: {
            Tensor ga = g;
            auto& o = ga.values();
            const auto& y = n.val.values();
            for (size_t i = 0; i < o.size(); ++i) o[i] *= 1.0 - y[i] * y[i];
            accumulate(n.in[0], ga);
            break;
        }
        case Op::Relu: {
            // Subgradient 0 at the kink.
            Tensor ga = g;
            auto& o = ga.values();
            const auto& x = n.in[0]->val.values();
            for (size_t i = 0; i < o.size(); ++i)
                if (x[i] <= 0.0) o[i] = 0.0;
            accumulate(n.in[0], ga);
            break;
        }
        case Op::SoftmaxRows: {
            const Tensor& y = n.val;
            Tensor ga = Tensor::zeros(y.rows(), y.cols());
            for (int i = 0; i < y.rows(); ++i) {
                double dot = 0.0;
                for (int j = 0; j < y.cols(); ++j) dot += g.at(i, j) * y.at(i, j);
                for (int j = 0; j < y.cols(); ++j)
                    ga.at(i, j) = y.at(i, j) * (g.at(i, j) - dot);
            }
            accumulate(n.in[0], ga);
            break;
        }
        case Op::LogSumExpRows: {
            const Tensor& X = n.in[0]->val;
            Tensor ga = Tensor::zeros(X.rows(), X.cols());
            for (int i = 0; i < X.rows(); ++i)
                for (int j = 0; j < X.cols(); ++j)
                    ga.at(i, j) = g.at(i, 0) * std::exp(X.at(i, j) - n.val.at(i, 0));
            accumulate(n.in[0], ga);
            break;
        }
        case Op::DiagCol: {
            Tensor ga = Tensor::zeros(n.in[0]->val.rows(), n.in[0]->val.cols());
            for (int i = 0; i < ga.rows(); ++i) ga.at(i, i) = g.at(i, 0);
            accumulate(n.in[0], ga);
            break;
        }
        case Op::Gather: {
            if (n.in[0]->requires_grad) {
                Tensor gt = Tensor::zeros(n.in[0]->val.rows(), n.in[0]->val.cols());
                for (size_t r = 0; r < n.ids.size(); ++r)
                    for (int j = 0; j < gt.cols(); ++j)
                        gt.at(n.ids[r], j) += g.at(static_cast<int>(r), j);
                accumulate(n.in[0], gt);
            }
            break;
        }
        case Op::Dropout: {
            Tensor ga = g;
            if (n.rate != 0.0) {
                const double keep_scale = 1.0 / (1.0 - n.rate);
                auto& o = ga.values();
                for (size_t i = 0; i < o.size(); ++i) {
                    bool keep = to_unit(elem_hash(n.seed, i)) >= n.rate;
                    o[i] = keep ? o[i] * keep_scale : 0.0;
                }
            }
            accumulate(n.in[0], ga);
            break;
        }
        case Op::ConcatRows: {
            const int ar = n.in[0]->val.rows();
            if (n.in[0]->requires_grad) {
                Tensor ga = Tensor::zeros(ar, g.cols());
                for (int i = 0; i < ar; ++i)
                    for (int j = 0; j < g.cols(); ++j) ga.at(i, j) = g.at(i, j);
                accumulate(n.in[0], ga);
            }
            if (n.in[1]->requires_grad) {
                Tensor gb = Tensor::zeros(g.rows() - ar, g.cols());
                for (int i = 0; i < gb.rows(); ++i)
                    for (int j = 0; j < g.cols(); ++j) gb.at(i, j) = g.at(ar + i, j);
                accumulate(n.in[1], gb);
            }
            break;
        }
        case Op::ConcatCols: {
            const int ac = n.in[0]->val.cols();
            if (n.in[0]->requires_grad) {
                Tensor ga = Tensor::zeros(g.rows(), ac);
                for (int i = 0; i < g.rows(); ++i)
                    for (int j = 0; j < ac; ++j) ga.at(i, j) = g.at(i, j);
                accumulate(n.in[0], ga);
            }
            if (n.in[1]->requires_grad) {
                Tensor gb = Tensor::zeros(g.rows(), g.cols() - ac);
                for (int i = 0; i < g.rows(); ++i)
                    for (int j = 0; j < gb.cols(); ++j) gb.at(i, j) = g.at(i, ac + j);
                accumulate(n.in[1], gb);
            }
            break;
        }
        case Op::Slice: {
            Tensor ga = Tensor::zeros(n.in[0]->val.rows(), n.in[0]->val.cols());
            for (int i = n.r0; i < n.r1; ++i)
                for (int j = n.c0; j < n.c1; ++j) ga.at(i, j) = g.at(i - n.r0, j - n.c0);
            accumulate(n.in[0], ga);
            break;
        }
        case Op::MeanAll: {
            const double go = g.at(0, 0) / static_cast<double>(n.in[0]->val.numel());
            Tensor ga = Tensor::zeros(n.in[0]->val.rows(), n.in[0]->val.cols());
            for (double& x : ga.values()) x = go;
            accumulate(n.in[0], ga);
            break;
        }
        case Op::CosineRows: {
            Node* A = n.in[0];
            Node* B = n.in[1];
            const Tensor& Av = A->val;
            const Tensor& Bv = B->val;
            const int d = Av.cols();
            std::vector<double> na(Av.rows()), nb(Bv.rows());
            for (int i = 0; i < Av.rows(); ++i) na[i] = row_norm(Av, i);
            for (int j = 0; j < Bv.rows(); ++j) nb[j] = row_norm(Bv, j);
            Tensor ga = Tensor::zeros(Av.rows(), d);
            Tensor gb = Tensor::zeros(Bv.rows(), d);
            for (int i = 0; i < Av.rows(); ++i) {
                for (int j = 0; j < Bv.rows(); ++j) {
                    const double gij = g.at(i, j);
                    if (gij == 0.0) continue;
                    const double cij = n.val.at(i, j);
                    for (int k = 0; k < d; ++k) {
                        const double ahat = Av.at(i, k) / na[i];
                        const double bhat = Bv.at(j, k) / nb[j];
                        ga.at(i, k) += gij * (bhat - cij * ahat) / na[i];
                        gb.at(j, k) += gij * (ahat - cij * bhat) / nb[j];
                    }
                }
            }
            accumulate(A, ga);
            accumulate(B, gb);
            break;
        }
    }
}

void Graph::backward(Node* out) {
    if (!out->val.is_scalar())
        throw ContractError("backward: output is not scalar, shape " + out->val.shape_str() +
                            "; pass an explicit seed gradient");
    backward(out, Tensor::scalar(1.0));
}

void Graph::backward(Node* out, const Tensor& seed_grad) {
    if (!forwarded_ || !out->has_val)
        throw StateError("backward before forward on this graph");
    if (!seed_grad.same_shape(out->val))
        throw DimError("backward: seed gradient shape " + seed_grad.shape_str() +
                       " does not match output " + out->val.shape_str());
    for (Node& n : nodes_) {
        n.grad = Tensor();
    }
    out->grad = seed_grad;
    if (!out->requires_grad) out->requires_grad = true;
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) backprop(*it);
}

}  // namespace sncse::num

#include "sncse/objectives.hpp"

#include <cmath>

#include "sncse/errors.hpp"

namespace sncse::obj {

void Hyperparams::validate() const {
    if (tau <= 0.0) throw ConfigError("tau must be > 0");
    if (!(0.0 <= alpha && alpha <= beta && beta <= 2.0))
        throw ConfigError("margins must satisfy 0 <= alpha <= beta <= 2");
    if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
    if (batch_size < 1) throw ConfigError("batch size must be >= 1");
    if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout rate must be in [0, 1)");
    if (lr <= 0.0) throw ConfigError("learning rate must be > 0");
}

double cosine(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size()) throw DimError("cosine: vector lengths differ");
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    nu = std::sqrt(nu);
    nv = std::sqrt(nv);
    if (nu <= 1e-12 || nv <= 1e-12)
        throw DegenerateInputError("cosine: near-zero norm input");
    return dot / (nu * nv);
}

namespace {

void check_batches(Node* H, Node* Hp, double tau) {
    if (tau <= 0.0) throw ConfigError("infonce: tau must be > 0");
    if (H->val.rows() < 1) throw InputError("infonce: empty batch");
    if (H->val.rows() != Hp->val.rows())
        throw InputError("infonce: batch sizes differ, " + H->val.shape_str() + " vs " +
                         Hp->val.shape_str());
}

}  // namespace

Node* infonce_loss(Graph& g, Node* H, Node* Hp, double tau) {
    check_batches(H, Hp, tau);
    Node* sims = g.scale(g.cosine_rows(H, Hp), 1.0 / tau);
    return g.mean_all(g.sub(g.logsumexp_rows(sims), g.diag_col(sims)));
}

Node* delta_col(Graph& g, Node* H, Node* Hp, Node* Hn) {
    if (H->val.rows() != Hp->val.rows() || H->val.rows() != Hn->val.rows())
        throw InputError("delta: batch sizes differ");
    Node* soft = g.diag_col(g.cosine_rows(H, Hn));
    Node* pos = g.diag_col(g.cosine_rows(H, Hp));
    return g.sub(soft, pos);
}

Node* bml_loss(Graph& g, Node* delta, double alpha, double beta) {
    if (alpha > beta) throw ConfigError("bml: alpha must be <= beta");
    Node* lower = g.relu(g.add_const(delta, alpha));
    Node* upper = g.relu(g.add_const(g.scale(delta, -1.0), -beta));
    return g.mean_all(g.add(lower, upper));
}

Node* total_loss(Graph& g, Node* infonce, Node* bml, double lambda) {
    if (lambda < 0.0) throw ConfigError("total: lambda must be >= 0");
    return g.add(infonce, g.scale(bml, lambda));
}

Node* pl_loss(Graph& g, Node* H, Node* Hp, Node* Hn, double tau) {
    return g.add(infonce_loss(g, H, Hp, tau), infonce_loss(g, H, Hn, tau));
}

Node* nl_loss(Graph& g, Node* H, Node* Hp, Node* Hn, double tau) {
    check_batches(H, Hp, tau);
    if (H->val.rows() != Hn->val.rows()) throw InputError("nl: batch sizes differ");
    Node* pos_sims = g.scale(g.cosine_rows(H, Hp), 1.0 / tau);
    Node* own_neg = g.scale(g.diag_col(g.cosine_rows(H, Hn)), 1.0 / tau);
    Node* denom = g.logsumexp_rows(g.concat_cols(pos_sims, own_neg));
    return g.mean_all(g.sub(denom, g.diag_col(pos_sims)));
}

}  // namespace sncse::obj

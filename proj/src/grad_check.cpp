#include "sncse/grad_check.hpp"

#include <cmath>

#include "sncse/errors.hpp"

namespace sncse::num {

double grad_check(const ScalarBuilder& build, std::vector<Tensor> points, double step) {
    if (step <= 0.0) throw ContractError("grad_check: step must be > 0");

    Graph g;
    std::vector<Node*> leaves;
    leaves.reserve(points.size());
    for (size_t i = 0; i < points.size(); ++i)
        leaves.push_back(g.param(&points[i], "x" + std::to_string(i)));
    Node* out = build(g, leaves);
    g.forward();
    if (!out->val.is_scalar())
        throw ContractError("grad_check: function output is not scalar, shape " +
                            out->val.shape_str());
    g.backward(out);

    std::vector<Tensor> analytic;
    analytic.reserve(leaves.size());
    for (Node* l : leaves)
        analytic.push_back(l->grad.numel() ? l->grad
                                           : Tensor::zeros(l->val.rows(), l->val.cols()));

    double max_rel = 0.0;
    for (size_t t = 0; t < points.size(); ++t) {
        auto& vals = points[t].values();
        for (size_t i = 0; i < vals.size(); ++i) {
            const double orig = vals[i];
            vals[i] = orig + step;
            g.forward();
            const double fp = out->val.item();
            vals[i] = orig - step;
            g.forward();
            const double fm = out->val.item();
            vals[i] = orig;
            const double fd = (fp - fm) / (2.0 * step);
            const double a = analytic[t].values()[i];
            const double rel = std::abs(a - fd) / std::max(1.0, std::abs(a));
            max_rel = std::max(max_rel, rel);
        }
    }
    return max_rel;
}

double grad_check(const std::function<Node*(Graph&, Node*)>& build, const Tensor& point,
                  double step) {
    return grad_check(
        [&](Graph& g, const std::vector<Node*>& leaves) { return build(g, leaves[0]); },
        {point}, step);
}

}  // namespace sncse::num

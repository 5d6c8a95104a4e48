#include "sncse/adamw.hpp"

#include <cmath>

#include "sncse/errors.hpp"

namespace sncse::num {

void AdamW::update(const std::string& name, Tensor& param, const Tensor& grad) {
    if (t_ < 1) throw StateError("adamw: update before step_begin");
    if (!param.same_shape(grad))
        throw DimError("adamw: gradient shape " + grad.shape_str() + " does not match parameter " +
                       param.shape_str() + " ('" + name + "')");
    for (double gx : grad.values())
        if (std::isnan(gx)) throw NumericError("adamw: NaN gradient for '" + name + "'");

    auto [mit, fresh_m] = m_.try_emplace(name, param.shape(), 0.0);
    auto [vit, fresh_v] = v_.try_emplace(name, param.shape(), 0.0);
    Tensor& m = mit->second;
    Tensor& v = vit->second;
    if (!m.same_shape(param) || !v.same_shape(param))
        throw DimError("adamw: stale moment shape for '" + name + "'");

    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));

    auto& pv = param.values();
    const auto& gv = grad.values();
    auto& mv = m.values();
    auto& vv = v.values();
    for (size_t i = 0; i < pv.size(); ++i) {
        mv[i] = cfg_.beta1 * mv[i] + (1.0 - cfg_.beta1) * gv[i];
        vv[i] = cfg_.beta2 * vv[i] + (1.0 - cfg_.beta2) * gv[i] * gv[i];
        const double mhat = mv[i] / bc1;
        const double vhat = vv[i] / bc2;
        pv[i] -= cfg_.lr * cfg_.weight_decay * pv[i];
        pv[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
}

void AdamW::restore(int64_t step, std::map<std::string, Tensor> m, std::map<std::string, Tensor> v) {
    if (step < 0) throw StateError("adamw: negative step counter");
    t_ = step;
    m_ = std::move(m);
    v_ = std::move(v);
}

}  // namespace sncse::num

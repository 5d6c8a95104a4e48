#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "sncse/tensor.hpp"

namespace sncse::num {

struct AdamWConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.01;
};

// AdamW with decoupled weight decay: the decay term acts on the parameters
// directly and never enters the moment estimates.
class AdamW {
public:
    explicit AdamW(AdamWConfig cfg = {}) : cfg_(cfg) {}

    const AdamWConfig& config() const { return cfg_; }
    int64_t step_count() const { return t_; }
    void set_lr(double lr) { cfg_.lr = lr; }

    // One update for a single named parameter. Call step_begin() once per
    // optimizer step before updating each parameter of the model.
    void step_begin() { ++t_; }

    void update(const std::string& name, Tensor& param, const Tensor& grad);

    // Moment accumulators, exposed for checkpointing.
    std::map<std::string, Tensor>& first_moments() { return m_; }
    std::map<std::string, Tensor>& second_moments() { return v_; }
    const std::map<std::string, Tensor>& first_moments() const { return m_; }
    const std::map<std::string, Tensor>& second_moments() const { return v_; }
    void restore(int64_t step, std::map<std::string, Tensor> m, std::map<std::string, Tensor> v);

private:
    AdamWConfig cfg_;
    int64_t t_ = 0;
    std::map<std::string, Tensor> m_;
    std::map<std::string, Tensor> v_;
};

}  // namespace sncse::num

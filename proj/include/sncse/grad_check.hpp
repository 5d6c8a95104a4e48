#pragma once

#include <functional>
#include <vector>

#include "sncse/graph.hpp"

namespace sncse::num {

// Builder receives a fresh graph plus one bound leaf per input tensor and
// returns the scalar output node.
using ScalarBuilder = std::function<Node*(Graph&, const std::vector<Node*>&)>;

// Central-difference gradient check. Returns the max over all coordinates of
//   |analytic - fd| / max(1, |analytic|).
// Central differences keep the truncation error at O(step^2).
double grad_check(const ScalarBuilder& build, std::vector<Tensor> points, double step = 1e-6);

double grad_check(const std::function<Node*(Graph&, Node*)>& build, const Tensor& point,
                  double step = 1e-6);

}  // namespace sncse::num

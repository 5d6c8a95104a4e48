#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sncse::num {

struct GradSuiteEntry {
    std::string name;
    double max_rel_err = 0.0;
};

// Finite-difference validation of every loss (InfoNCE, BML, total, PL, NL)
// and the full encoder-to-loss pipeline: 10 random instances each, batches
// of at most 4, embedding dims at most 8, margin gaps kept at least 1e-3
// away from the ReLU kinks.
std::vector<GradSuiteEntry> run_gradient_suite(uint64_t seed, int trials = 10);

}  // namespace sncse::num

#pragma once

#include <map>
#include <string>

#include "sncse/tensor.hpp"

namespace sncse::num {

// On-disk container: versioned header, a string meta section, and a table of
// named little-endian double tensors. Optimizer moments travel in the same
// table under "opt.m." / "opt.v." prefixes.
struct Checkpoint {
    static constexpr uint32_t kMagic = 0x4B434E53;  // "SNCK"
    static constexpr uint32_t kVersion = 1;

    std::map<std::string, std::string> meta;
    std::map<std::string, Tensor> tensors;

    void save(const std::string& path) const;
    static Checkpoint load(const std::string& path);
};

}  // namespace sncse::num

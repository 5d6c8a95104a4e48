#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sncse::data {

// Deterministic synthetic English corpus used for the bundled desk-scale
// fixture: template grammar over word banks, all constructions covered by
// the negation rules (plus a sprinkle of pre-negated sentences and verbless
// fragments so the skip path sees real traffic).
std::vector<std::string> generate_sentences(int count, uint64_t seed);

struct ScoredPair {
    std::string sentence1;
    std::string sentence2;
    double score = 0.0;  // [0, 5]
};

// STS-style pairs with rule-assigned scores: identical > paraphrase >
// shared-topic > negation > unrelated, with a small deterministic jitter to
// keep gold ranks mostly tie-free.
std::vector<ScoredPair> generate_sts_pairs(const std::vector<std::string>& pool, int count,
                                           uint64_t seed);

}  // namespace sncse::data

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sncse/objectives.hpp"
#include "sncse/vocab.hpp"

namespace sncse::data {

struct STSPair {
    std::string sentence1;
    std::string sentence2;
    double gold = 0.0;  // [0, 5]
    std::string subtask;
    std::string split;
};

struct STSData {
    std::vector<STSPair> pairs;
    // (subtask, split) -> pair count
    std::map<std::pair<std::string, std::string>, int> counts;

    std::vector<const STSPair*> subtask_split(const std::string& subtask,
                                              const std::string& split) const;
};

// One sentence per line, UTF-8; blank lines dropped, CRLF tolerated.
std::vector<std::string> load_corpus(const std::string& path);

// TSV pairs `original<TAB>negation` as produced by negate_corpus.
struct SentencePair {
    std::string original;
    std::string negation;
};
std::vector<SentencePair> load_pairs_tsv(const std::string& path);

// Directory layout: root/<subtask>/{train,dev,test}.tsv with rows
// `score<TAB>sentence1<TAB>sentence2`, score in [0, 5].
STSData load_sts(const std::string& root_dir, const std::vector<std::string>& subtasks);
STSData load_sts(const std::string& root_dir);  // discovers subtask directories

// Published benchmark test-set sizes, used to validate real data when supplied.
const std::map<std::string, std::map<std::string, int>>& reference_sts_counts();

// Throws DataError when a known subtask's counts disagree with the reference.
void verify_reference_counts(const STSData& data);

struct Triplet {
    enc::TemplatedSequence original;
    enc::TemplatedSequence positive;
    enc::TemplatedSequence soft_negative;
    uint64_t seed_original = 0;
    uint64_t seed_positive = 0;
};

struct TripletBatch {
    std::vector<Triplet> triplets;
};

// Seeded shuffle per epoch; every sentence lands in exactly one batch; the
// final partial batch is kept. Dropout seed pairs are drawn per example from
// the epoch stream.
std::vector<TripletBatch> make_batches(const std::vector<SentencePair>& pairs,
                                       const enc::Vocabulary& vocab,
                                       const obj::Hyperparams& hyper, uint64_t epoch_seed);

}  // namespace sncse::data

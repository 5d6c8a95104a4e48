#include "sncse/data.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "sncse/rng.hpp"

namespace fs = std::filesystem;

namespace sncse::data {

using num::mix;
using num::Rng;

std::vector<std::string> load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus file '" + path + "'");
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

std::vector<SentencePair> load_pairs_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open pair file '" + path + "'");
    std::vector<SentencePair> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw DataError(path + ":" + std::to_string(line_no) + ": expected 2 tab-separated columns");
        out.push_back({line.substr(0, tab), line.substr(tab + 1)});
    }
    return out;
}

std::vector<const STSPair*> STSData::subtask_split(const std::string& subtask,
                                                   const std::string& split) const {
    std::vector<const STSPair*> out;
    for (const auto& p : pairs)
        if (p.subtask == subtask && p.split == split) out.push_back(&p);
    return out;
}

namespace {

void load_sts_file(const fs::path& file, const std::string& subtask, const std::string& split,
                   STSData& out) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open STS file '" + file.string() + "'");
    std::string line;
    int line_no = 0;
    int count = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto t1 = line.find('\t');
        auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        auto t3 = t2 == std::string::npos ? std::string::npos : line.find('\t', t2 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos || t3 != std::string::npos)
            throw DataError(file.string() + ":" + std::to_string(line_no) +
                            ": expected 3 tab-separated columns");
        STSPair pair;
        try {
            pair.gold = std::stod(line.substr(0, t1));
        } catch (...) {
            throw DataError(file.string() + ":" + std::to_string(line_no) + ": bad score field");
        }
        if (pair.gold < 0.0 || pair.gold > 5.0)
            throw DataError(file.string() + ":" + std::to_string(line_no) + ": score " +
                            std::to_string(pair.gold) + " outside [0, 5]");
        pair.sentence1 = line.substr(t1 + 1, t2 - t1 - 1);
        pair.sentence2 = line.substr(t2 + 1);
        pair.subtask = subtask;
        pair.split = split;
        out.pairs.push_back(std::move(pair));
        ++count;
    }
    out.counts[{subtask, split}] = count;
}

}  // namespace

STSData load_sts(const std::string& root_dir, const std::vector<std::string>& subtasks) {
    STSData out;
    for (const auto& subtask : subtasks) {
        const fs::path dir = fs::path(root_dir) / subtask;
        if (!fs::is_directory(dir))
            throw IoError("STS subtask directory missing: '" + dir.string() + "'");
        bool any = false;
        for (const char* split : {"train", "dev", "test"}) {
            const fs::path file = dir / (std::string(split) + ".tsv");
            if (fs::exists(file)) {
                load_sts_file(file, subtask, split, out);
                any = true;
            }
        }
        if (!any)
            throw DataError("STS subtask '" + subtask + "' has no train/dev/test.tsv files");
    }
    return out;
}

STSData load_sts(const std::string& root_dir) {
    if (!fs::is_directory(root_dir)) throw IoError("STS root is not a directory: '" + root_dir + "'");
    std::vector<std::string> subtasks;
    for (const auto& entry : fs::directory_iterator(root_dir))
        if (entry.is_directory()) subtasks.push_back(entry.path().filename().string());
    std::sort(subtasks.begin(), subtasks.end());
    if (subtasks.empty()) throw DataError("no subtask directories under '" + root_dir + "'");
    return load_sts(root_dir, subtasks);
}

const std::map<std::string, std::map<std::string, int>>& reference_sts_counts() {
    static const std::map<std::string, std::map<std::string, int>> table = {
        {"STS12", {{"test", 3108}}},
        {"STS13", {{"test", 1500}}},
        {"STS14", {{"test", 3750}}},
        {"STS15", {{"test", 3000}}},
        {"STS16", {{"test", 1186}}},
        {"STSB", {{"train", 5749}, {"dev", 1500}, {"test", 1379}}},
        {"SICKR", {{"train", 4500}, {"dev", 500}, {"test", 4927}}},
    };
    return table;
}

void verify_reference_counts(const STSData& data) {
    const auto& reference = reference_sts_counts();
    for (const auto& [key, count] : data.counts) {
        auto sub = reference.find(key.first);
        if (sub == reference.end()) continue;  // custom subtask, nothing to check
        auto split = sub->second.find(key.second);
        if (split == sub->second.end()) continue;
        if (split->second != count)
            throw DataError("subtask " + key.first + "/" + key.second + " has " +
                            std::to_string(count) + " pairs, reference says " +
                            std::to_string(split->second));
    }
}

std::vector<TripletBatch> make_batches(const std::vector<SentencePair>& pairs,
                                       const enc::Vocabulary& vocab,
                                       const obj::Hyperparams& hyper, uint64_t epoch_seed) {
    if (!vocab.contains("[MASK]") || !vocab.contains("[PAD]"))
        throw ConfigError("make_batches: vocabulary lacks reserved tokens");
    hyper.validate();

    std::vector<size_t> order(pairs.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng shuffle_rng(mix(epoch_seed, num::fnv1a("shuffle")));
    for (size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[shuffle_rng.below(i)]);

    Rng seed_rng(mix(epoch_seed, num::fnv1a("dropout")));
    std::vector<TripletBatch> batches;
    TripletBatch cur;
    for (size_t idx : order) {
        const SentencePair& pair = pairs[idx];
        Triplet t;
        t.original = vocab.apply_template(pair.original, enc::TemplateVariant::Original);
        t.positive = vocab.apply_template(pair.original, enc::TemplateVariant::Positive);
        t.soft_negative =
            vocab.apply_template(pair.negation.empty() ? pair.original : pair.negation,
                                 enc::TemplateVariant::SoftNegative);
        t.seed_original = seed_rng.next_u64();
        t.seed_positive = seed_rng.next_u64();
        cur.triplets.push_back(std::move(t));
        if (static_cast<int>(cur.triplets.size()) == hyper.batch_size) {
            batches.push_back(std::move(cur));
            cur = TripletBatch{};
        }
    }
    if (!cur.triplets.empty()) batches.push_back(std::move(cur));
    return batches;
}

}  // namespace sncse::data

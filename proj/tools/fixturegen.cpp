// Regenerates the bundled fixture: corpus, parses, negations, held-out split,
// toy STS files, and the run config. Deterministic; committed outputs should
// only change when the generator or the rules change.
#include <filesystem>
#include <fstream>
#include <iostream>

#include "sncse/fixture.hpp"
#include "sncse/negation.hpp"
#include "sncse/tagger.hpp"

namespace fs = std::filesystem;
using namespace sncse;

namespace {

constexpr uint64_t kSeed = 2024;
constexpr int kTrain = 2000;
constexpr int kHeldout = 200;
constexpr int kStsPerSplit = 100;

void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
    std::ofstream os(path);
    for (const auto& l : lines) os << l << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    fs::path root = argc > 1 ? argv[1] : "fixture";
    fs::create_directories(root / "sts" / "toy");

    auto all = data::generate_sentences(kTrain + kHeldout, kSeed);
    std::vector<std::string> corpus(all.begin(), all.begin() + kTrain);
    std::vector<std::string> heldout(all.begin() + kTrain, all.end());

    auto corpus_parses = neg::heuristic_parse_corpus(corpus);
    auto heldout_parses = neg::heuristic_parse_corpus(heldout);

    write_lines(root / "corpus.txt", corpus);
    write_lines(root / "heldout.txt", heldout);
    {
        std::ofstream os(root / "corpus.conllu");
        neg::write_conllu(os, corpus_parses);
    }
    {
        std::ofstream os(root / "sample.conllu");
        neg::write_conllu(os, std::vector<neg::ParsedSentence>(corpus_parses.begin(),
                                                               corpus_parses.begin() + 25));
    }

    auto corpus_neg = neg::negate_corpus(corpus, corpus_parses);
    auto heldout_neg = neg::negate_corpus(heldout, heldout_parses);
    {
        std::ofstream os(root / "negations.tsv");
        neg::write_pairs_tsv(os, corpus_neg);
    }
    {
        std::ofstream os(root / "negation_skips.json");
        neg::write_skip_report_json(os, corpus_neg);
    }
    {
        std::ofstream os(root / "heldout_negations.tsv");
        neg::write_pairs_tsv(os, heldout_neg);
    }

    auto sts = data::generate_sts_pairs(all, 2 * kStsPerSplit, kSeed);
    for (int split = 0; split < 2; ++split) {
        std::ofstream os(root / "sts" / "toy" / (split == 0 ? "dev.tsv" : "test.tsv"));
        for (int i = split * kStsPerSplit; i < (split + 1) * kStsPerSplit; ++i)
            os << sts[i].score << "\t" << sts[i].sentence1 << "\t" << sts[i].sentence2 << "\n";
    }

    {
        std::ofstream os(root / "train.cfg");
        os << "# Reference desk-scale training configuration.\n"
           << "corpus = corpus.txt\n"
           << "negations = negations.tsv\n"
           << "heldout = heldout_negations.tsv\n"
           << "sts_dir = sts\n"
           << "dev_subtask = toy\n"
           << "checkpoint_dir = ../runs/fixture\n"
           << "loss_mode = sncse\n"
           << "epochs = 1\n"
           << "batch_size = 16\n"
           << "lr = 2e-3\n"
           << "eval_interval = 125\n"
           << "tau = 0.05\n"
           << "alpha = 0.1\n"
           << "beta = 0.3\n"
           << "lambda = 1e-3\n"
           << "dropout = 0.1\n"
           << "seed = 42\n";
    }

    std::cout << "fixture written under " << root.string() << ": " << corpus.size()
              << " train sentences (" << corpus_neg.pairs.size() << " negated, "
              << corpus_neg.skips.size() << " skipped), " << heldout.size() << " held out, "
              << 2 * kStsPerSplit << " STS pairs\n";
    return 0;
}

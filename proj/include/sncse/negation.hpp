#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "sncse/errors.hpp"

namespace sncse::neg {

struct ParsedToken {
    std::string form;
    std::string lemma;
    std::string upos;
    int head = 0;  // 1-based head index, 0 = root
    std::string deprel;
    std::map<std::string, std::string> feats;
    bool space_after = true;
};

struct ParsedSentence {
    std::string text;
    std::vector<ParsedToken> tokens;

    int root_index() const;  // 0-based, -1 when absent
    std::string detokenize() const;
};

enum class Rule { R1_RemoveExisting, R2_AfterAuxiliary, R3_AfterModal, R4_DoSupport };

const char* rule_id(Rule r);

struct NegationResult {
    std::string text;
    Rule rule = Rule::R2_AfterAuxiliary;
    int position = -1;  // token index of the inserted or removed negator
};

// Raised when no rule applies (verbless fragments and the like).
struct NegationError : Error {
    enum class Reason { NoFiniteVerb, NoRoot };
    NegationError(Reason r, const std::string& msg) : Error(msg), reason(r) {}
    Reason reason;
};

const char* reason_id(NegationError::Reason r);

struct ConlluResult {
    std::vector<ParsedSentence> sentences;
    int skipped_missing_root = 0;
};

// Standard 10-column CoNLL-U. Multiword ranges and empty nodes are skipped in
// favor of their parts; `# text =` comments are honored; malformed rows fail
// with their line number.
ConlluResult load_conllu(const std::string& path);
ConlluResult read_conllu(std::istream& in, const std::string& source_name);

void write_conllu(std::ostream& out, const std::vector<ParsedSentence>& sentences);

// Negates the root clause: R1 removes an existing negator (polarity flip),
// R2/R3 insert "not" after the first auxiliary/copula or modal, R4 applies
// do-support to a finite lexical root.
NegationResult negate(const ParsedSentence& s);

struct CorpusNegation {
    struct Pair {
        std::string original;
        std::string negation;
    };
    struct Skip {
        int line = 0;  // 1-based input position
        std::string reason;
    };
    std::vector<Pair> pairs;
    std::vector<Skip> skips;
};

// Parses aligned 1:1 with sentences by order; skipped sentences are excluded
// from the pair list and recorded with reasons.
CorpusNegation negate_corpus(const std::vector<std::string>& sentences,
                             const std::vector<ParsedSentence>& parses,
                             bool skip_negated = false);

void write_pairs_tsv(std::ostream& out, const CorpusNegation& result);
void write_skip_report_json(std::ostream& out, const CorpusNegation& result);

}  // namespace sncse::neg

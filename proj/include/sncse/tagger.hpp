#pragma once

#include <string>
#include <vector>

#include "sncse/negation.hpp"

namespace sncse::neg {

// Tiny heuristic tagger: closed-class word lists plus suffix rules, enough to
// parse the bundled test corpus without an external parser. Real workloads
// should feed parser-produced CoNLL-U into load_conllu instead.
ParsedSentence heuristic_parse(const std::string& sentence);

std::vector<ParsedSentence> heuristic_parse_corpus(const std::vector<std::string>& sentences);

// Conjugation helpers backed by the same irregular-verb table the tagger uses.
std::string verb_third(const std::string& lemma);
std::string verb_past(const std::string& lemma);
std::string verb_participle(const std::string& lemma);
std::string verb_ing(const std::string& lemma);

}  // namespace sncse::neg

#include "sncse/negation.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace sncse::neg {

namespace {

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

bool upper_first(const std::string& s) {
    return !s.empty() && std::isupper(static_cast<unsigned char>(s[0]));
}

const std::map<std::string, std::string>& contraction_hosts() {
    // Hosts that change surface form once "n't" is stripped.
    static const std::map<std::string, std::string> table = {
        {"wo", "will"}, {"ca", "can"}, {"sha", "shall"}, {"ai", "is"}};
    return table;
}

bool is_modal(const std::string& lemma) {
    static const std::vector<std::string> modals = {"can",  "could",  "may",  "might", "must",
                                                    "shall", "should", "will", "would"};
    return std::find(modals.begin(), modals.end(), lemma) != modals.end();
}

bool is_negator(const ParsedToken& t) {
    const std::string f = lower(t.form);
    return t.deprel == "neg" || f == "not" || f == "n't" || t.lemma == "not";
}

bool is_verbal(const ParsedToken& t) { return t.upos == "VERB" || t.upos == "AUX"; }

}  // namespace

const char* rule_id(Rule r) {
    switch (r) {
        case Rule::R1_RemoveExisting: return "R1";
        case Rule::R2_AfterAuxiliary: return "R2";
        case Rule::R3_AfterModal: return "R3";
        case Rule::R4_DoSupport: return "R4";
    }
    return "?";
}

const char* reason_id(NegationError::Reason r) {
    switch (r) {
        case NegationError::Reason::NoFiniteVerb: return "NoFiniteVerb";
        case NegationError::Reason::NoRoot: return "NoRoot";
    }
    return "?";
}

int ParsedSentence::root_index() const {
    for (size_t i = 0; i < tokens.size(); ++i)
        if (tokens[i].deprel == "root" || tokens[i].head == 0) return static_cast<int>(i);
    return -1;
}

std::string ParsedSentence::detokenize() const {
    std::string out;
    for (size_t i = 0; i < tokens.size(); ++i) {
        out += tokens[i].form;
        if (tokens[i].space_after && i + 1 < tokens.size()) out += " ";
    }
    return out;
}

// ---------------------------------------------------------------------------
// CoNLL-U
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> cols;
    std::string cur;
    for (char c : line) {
        if (c == '\t') {
            cols.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    cols.push_back(cur);
    return cols;
}

std::map<std::string, std::string> parse_feats(const std::string& feats) {
    std::map<std::string, std::string> out;
    if (feats == "_" || feats.empty()) return out;
    std::stringstream ss(feats);
    std::string item;
    while (std::getline(ss, item, '|')) {
        auto eq = item.find('=');
        if (eq != std::string::npos) out[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return out;
}

}  // namespace

ConlluResult read_conllu(std::istream& in, const std::string& source_name) {
    ConlluResult result;
    ParsedSentence cur;
    std::string line;
    int line_no = 0;
    bool in_sentence = false;

    auto flush = [&]() {
        if (!in_sentence) return;
        if (!cur.tokens.empty()) {
            if (cur.root_index() < 0) {
                ++result.skipped_missing_root;
            } else {
                if (cur.text.empty()) cur.text = cur.detokenize();
                result.sentences.push_back(std::move(cur));
            }
        }
        cur = ParsedSentence{};
        in_sentence = false;
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            flush();
            continue;
        }
        if (line[0] == '#') {
            const std::string text_prefix = "# text =";
            if (line.rfind(text_prefix, 0) == 0) {
                std::string t = line.substr(text_prefix.size());
                if (!t.empty() && t[0] == ' ') t.erase(0, 1);
                cur.text = t;
            }
            in_sentence = true;
            continue;
        }
        in_sentence = true;
        auto cols = split_tabs(line);
        if (cols.size() != 10)
            throw DataError(source_name + ":" + std::to_string(line_no) + ": expected 10 columns, got " +
                            std::to_string(cols.size()));
        const std::string& id = cols[0];
        if (id.find('-') != std::string::npos || id.find('.') != std::string::npos)
            continue;  // multiword range or empty node; the parts carry the content
        ParsedToken tok;
        tok.form = cols[1];
        tok.lemma = cols[2];
        tok.upos = cols[3];
        tok.feats = parse_feats(cols[5]);
        try {
            tok.head = std::stoi(cols[6]);
        } catch (...) {
            throw DataError(source_name + ":" + std::to_string(line_no) + ": bad HEAD field '" +
                            cols[6] + "'");
        }
        tok.deprel = cols[7];
        tok.space_after = cols[9].find("SpaceAfter=No") == std::string::npos;
        if (tok.head < 0 || tok.head > 4096)
            throw DataError(source_name + ":" + std::to_string(line_no) + ": head index out of range");
        cur.tokens.push_back(std::move(tok));
    }
    flush();

    for (const auto& s : result.sentences)
        for (const auto& t : s.tokens)
            if (t.head > static_cast<int>(s.tokens.size()))
                throw DataError(source_name + ": head index exceeds sentence length");
    return result;
}

ConlluResult load_conllu(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open CoNLL-U file '" + path + "'");
    return read_conllu(in, path);
}

void write_conllu(std::ostream& out, const std::vector<ParsedSentence>& sentences) {
    for (const auto& s : sentences) {
        out << "# text = " << s.text << "\n";
        for (size_t i = 0; i < s.tokens.size(); ++i) {
            const ParsedToken& t = s.tokens[i];
            std::string feats;
            for (const auto& [k, v] : t.feats) {
                if (!feats.empty()) feats += "|";
                feats += k + "=" + v;
            }
            if (feats.empty()) feats = "_";
            out << (i + 1) << "\t" << t.form << "\t" << t.lemma << "\t" << t.upos << "\t_\t"
                << feats << "\t" << t.head << "\t" << t.deprel << "\t_\t"
                << (t.space_after ? "_" : "SpaceAfter=No") << "\n";
        }
        out << "\n";
    }
}

// ---------------------------------------------------------------------------
// Rules
// ---------------------------------------------------------------------------

namespace {

struct VerbGroup {
    int root = -1;                 // 0-based
    std::vector<int> aux_or_cop;   // 0-based, linear order
    std::vector<int> negators;     // attached to the group
};

VerbGroup analyze(const ParsedSentence& s, int root) {
    VerbGroup vg;
    vg.root = root;
    const int root_id = root + 1;
    for (size_t i = 0; i < s.tokens.size(); ++i) {
        const ParsedToken& t = s.tokens[i];
        if (t.head == root_id &&
            (t.deprel == "aux" || t.deprel == "aux:pass" || t.deprel == "auxpass" ||
             t.deprel == "cop"))
            vg.aux_or_cop.push_back(static_cast<int>(i));
    }
    // A negator may attach to the root or to any verb-group member.
    auto in_group = [&](int head_id) {
        if (head_id == root_id) return true;
        for (int a : vg.aux_or_cop)
            if (head_id == a + 1) return true;
        return false;
    };
    for (size_t i = 0; i < s.tokens.size(); ++i)
        if (is_negator(s.tokens[i]) && in_group(s.tokens[i].head))
            vg.negators.push_back(static_cast<int>(i));
    return vg;
}

bool has_verbal_core(const ParsedSentence& s, const VerbGroup& vg) {
    if (!vg.aux_or_cop.empty()) return true;
    const ParsedToken& root = s.tokens[vg.root];
    if (!is_verbal(root)) return false;
    // A bare gerund/participle root with no auxiliary is not finite.
    auto vf = root.feats.find("VerbForm");
    if (vf != root.feats.end() && vf->second != "Fin") return false;
    if (vf == root.feats.end()) {
        const std::string f = lower(root.form);
        if (f.size() > 4 && f.compare(f.size() - 3, 3, "ing") == 0 && f != lower(root.lemma))
            return false;
    }
    return true;
}

// do / does / did agreeing with the root's tense and person.
std::string pick_do_form(const ParsedToken& root) {
    auto tense = root.feats.find("Tense");
    if (tense != root.feats.end()) {
        if (tense->second == "Past") return "did";
        auto person = root.feats.find("Person");
        auto number = root.feats.find("Number");
        if (person != root.feats.end() && person->second == "3" && number != root.feats.end() &&
            number->second == "Sing")
            return "does";
        return "do";
    }
    // Suffix heuristics when the parse carries no morphology.
    const std::string f = lower(root.form);
    const std::string l = lower(root.lemma);
    if (f == l) return "do";
    if (f == l + "s" || f == l + "es" ||
        (l.size() > 1 && l.back() == 'y' && f == l.substr(0, l.size() - 1) + "ies"))
        return "does";
    if (f == "has") return "does";
    return "did";
}

struct TokenEdit {
    std::vector<ParsedToken> tokens;
    Rule rule;
    int negator_pos = -1;
};

void transfer_capitalization(const ParsedSentence& original, std::vector<ParsedToken>& tokens) {
    if (tokens.empty() || original.tokens.empty()) return;
    const ParsedToken& old_first = original.tokens[0];
    if (tokens[0].form == old_first.form) return;
    if (!upper_first(old_first.form)) return;
    tokens[0].form[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(tokens[0].form[0])));
    // The displaced word loses its sentence-initial capital unless it keeps it
    // by nature.
    for (size_t i = 1; i < tokens.size(); ++i) {
        if (tokens[i].form == old_first.form && tokens[i].upos == old_first.upos) {
            if (old_first.upos != "PROPN" && old_first.form != "I")
                tokens[i].form[0] = static_cast<char>(
                    std::tolower(static_cast<unsigned char>(tokens[i].form[0])));
            break;
        }
    }
}

ParsedToken make_not() {
    ParsedToken t;
    t.form = "not";
    t.lemma = "not";
    t.upos = "PART";
    t.deprel = "neg";
    return t;
}

}  // namespace

NegationResult negate(const ParsedSentence& s) {
    if (s.tokens.empty()) throw InputError("negate: empty sentence");
    const int root = s.root_index();
    if (root < 0) throw NegationError(NegationError::Reason::NoRoot, "negate: sentence has no root");

    VerbGroup vg = analyze(s, root);
    if (!has_verbal_core(s, vg))
        throw NegationError(NegationError::Reason::NoFiniteVerb,
                            "negate: no finite verb in \"" + s.text + "\"");

    std::vector<ParsedToken> tokens = s.tokens;
    NegationResult result;

    if (!vg.negators.empty()) {
        // R1: polarity flip, remove the existing negator.
        const int pos = vg.negators.front();
        const bool contraction = lower(tokens[pos].form) == "n't";
        if (pos > 0) {
            tokens[pos - 1].space_after = tokens[pos].space_after;
            if (contraction) {
                auto host = contraction_hosts().find(lower(tokens[pos - 1].form));
                if (host != contraction_hosts().end()) {
                    const bool cap = upper_first(tokens[pos - 1].form);
                    tokens[pos - 1].form = host->second;
                    if (cap)
                        tokens[pos - 1].form[0] = static_cast<char>(
                            std::toupper(static_cast<unsigned char>(tokens[pos - 1].form[0])));
                }
            }
        }
        tokens.erase(tokens.begin() + pos);
        result.rule = Rule::R1_RemoveExisting;
        result.position = pos;
    } else if (!vg.aux_or_cop.empty() ||
               s.tokens[root].upos == "AUX" ||
               lower(s.tokens[root].lemma) == "be") {
        // R2/R3: insert "not" after the first auxiliary, copula, or root "be".
        int target = root;
        if (!vg.aux_or_cop.empty()) target = *std::min_element(vg.aux_or_cop.begin(), vg.aux_or_cop.end());
        const bool modal = is_modal(lower(tokens[target].lemma));
        ParsedToken not_tok = make_not();
        not_tok.head = root + 1;
        not_tok.space_after = tokens[target].space_after;
        tokens[target].space_after = true;
        tokens.insert(tokens.begin() + target + 1, not_tok);
        result.rule = modal ? Rule::R3_AfterModal : Rule::R2_AfterAuxiliary;
        result.position = target + 1;
    } else {
        // R4: do-support for a finite lexical root.
        ParsedToken do_tok;
        do_tok.form = pick_do_form(tokens[root]);
        do_tok.lemma = "do";
        do_tok.upos = "AUX";
        do_tok.deprel = "aux";
        do_tok.head = root + 1;
        ParsedToken not_tok = make_not();
        not_tok.head = root + 1;
        tokens[root].form = tokens[root].lemma;  // de-tensed main verb
        tokens.insert(tokens.begin() + root, not_tok);
        tokens.insert(tokens.begin() + root, do_tok);
        result.rule = Rule::R4_DoSupport;
        result.position = root + 1;
    }

    transfer_capitalization(s, tokens);
    ParsedSentence negated;
    negated.tokens = std::move(tokens);
    result.text = negated.detokenize();
    if (result.text == s.text)
        throw NegationError(NegationError::Reason::NoFiniteVerb,
                            "negate: produced unchanged text for \"" + s.text + "\"");
    return result;
}

CorpusNegation negate_corpus(const std::vector<std::string>& sentences,
                             const std::vector<ParsedSentence>& parses, bool skip_negated) {
    if (sentences.size() != parses.size())
        throw InputError("negate_corpus: " + std::to_string(sentences.size()) + " sentences vs " +
                         std::to_string(parses.size()) + " parses");
    CorpusNegation out;
    for (size_t i = 0; i < sentences.size(); ++i) {
        const int line = static_cast<int>(i) + 1;
        try {
            if (skip_negated) {
                const int root = parses[i].root_index();
                if (root >= 0 && !analyze(parses[i], root).negators.empty()) {
                    out.skips.push_back({line, "AlreadyNegated"});
                    continue;
                }
            }
            NegationResult r = negate(parses[i]);
            out.pairs.push_back({sentences[i], r.text});
        } catch (const NegationError& e) {
            out.skips.push_back({line, reason_id(e.reason)});
        }
    }
    return out;
}

void write_pairs_tsv(std::ostream& out, const CorpusNegation& result) {
    for (const auto& p : result.pairs) out << p.original << "\t" << p.negation << "\n";
}

void write_skip_report_json(std::ostream& out, const CorpusNegation& result) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : result.skips) arr.push_back({{"line", s.line}, {"reason", s.reason}});
    out << arr.dump(2) << "\n";
}

}  // namespace sncse::neg

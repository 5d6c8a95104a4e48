#include "sncse/vocab.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>

#include "sncse/errors.hpp"

namespace sncse::enc {

namespace {

bool is_punct(char c) {
    static const std::string puncts = ".,!?;:\"()'";
    return puncts.find(c) != std::string::npos;
}

const std::vector<std::string>& template_words() {
    static const std::vector<std::string> words = {"the",  "sentence", ":",      "of",
                                                   "\"",   "means",    "[MASK]", "."};
    return words;
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    };
    for (char raw : text) {
        char c = static_cast<char>(std::tolower(static_cast<unsigned char>(raw)));
        if (std::isspace(static_cast<unsigned char>(c))) {
            flush();
        } else if (is_punct(c)) {
            flush();
            out.emplace_back(1, c);
        } else {
            cur.push_back(c);
        }
    }
    flush();
    return out;
}

Vocabulary::Vocabulary() {
    add("[PAD]");
    add("[UNK]");
    add("[MASK]");
    for (const auto& w : template_words())
        if (!contains(w)) add(w);
}

int Vocabulary::add(const std::string& token) {
    auto it = index_.find(token);
    if (it != index_.end()) return it->second;
    int id = static_cast<int>(tokens_.size());
    tokens_.push_back(token);
    index_.emplace(token, id);
    return id;
}

Vocabulary Vocabulary::build(const std::vector<std::string>& sentences, int min_freq) {
    std::map<std::string, int> freq;  // ordered map keeps ids deterministic
    for (const auto& s : sentences)
        for (const auto& t : tokenize(s)) ++freq[t];
    Vocabulary v;
    for (const auto& [tok, count] : freq)
        if (count >= min_freq) v.add(tok);
    return v;
}

int Vocabulary::id_of(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token_of(int id) const {
    if (id < 0 || id >= size()) throw ContractError("vocabulary: id out of range");
    return tokens_[id];
}

void Vocabulary::save(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw IoError("vocabulary: cannot write '" + path + "'");
    for (const auto& t : tokens_) os << t << "\n";
}

Vocabulary Vocabulary::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("vocabulary: cannot open '" + path + "'");
    Vocabulary v;
    v.tokens_.clear();
    v.index_.clear();
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        v.add(line);
    }
    if (v.size() < 3 || v.tokens_[kPad] != "[PAD]" || v.tokens_[kUnk] != "[UNK]" ||
        v.tokens_[kMask] != "[MASK]")
        throw DataError("vocabulary: reserved tokens missing or misplaced in '" + path + "'");
    return v;
}

TemplatedSequence Vocabulary::apply_template(const std::string& sentence,
                                             TemplateVariant variant) const {
    std::vector<std::string> inner = tokenize(sentence);
    if (inner.empty()) throw InputError("apply_template: empty sentence");

    std::vector<std::string> toks = {"the", "sentence",
                                     variant == TemplateVariant::Original ? ":" : "of", "\""};
    toks.insert(toks.end(), inner.begin(), inner.end());
    toks.push_back("\"");
    toks.push_back("means");
    toks.push_back("[MASK]");
    toks.push_back(".");

    TemplatedSequence seq;
    seq.ids.reserve(toks.size());
    for (size_t i = 0; i < toks.size(); ++i) {
        if (toks[i] == "[MASK]") seq.mask_pos = static_cast<int>(i);
        seq.ids.push_back(id_of(toks[i]));
    }
    return seq;
}

}  // namespace sncse::enc

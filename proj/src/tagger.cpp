#include "sncse/tagger.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace sncse::neg {

namespace {

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

bool is_punct_tok(const std::string& s) {
    return s.size() == 1 && std::string(".,!?;:").find(s[0]) != std::string::npos;
}

const std::set<std::string>& dets() {
    static const std::set<std::string> s = {"a",   "an",  "the",   "this", "that",  "these",
                                            "those", "my", "your", "his",  "her",   "its",
                                            "our", "their", "every", "each", "some", "two",
                                            "three", "four", "five", "several", "many"};
    return s;
}

const std::set<std::string>& pronouns() {
    static const std::set<std::string> s = {"i",  "you", "he",     "she",      "it",
                                            "we", "they", "someone", "everyone", "nobody"};
    return s;
}

const std::set<std::string>& be_forms() {
    static const std::set<std::string> s = {"am", "is", "are", "was", "were", "be", "been", "being"};
    return s;
}

const std::set<std::string>& modals() {
    static const std::set<std::string> s = {"can",  "could",  "may",  "might", "must",
                                            "shall", "should", "will", "would"};
    return s;
}

const std::set<std::string>& preps() {
    static const std::set<std::string> s = {
        "in",   "on",     "at",     "near",  "with",   "under",  "over",   "by",
        "for",  "from",   "of",     "to",    "into",   "through", "during", "behind",
        "beside", "between", "across", "along", "around", "after",  "before", "without"};
    return s;
}

const std::set<std::string>& conjs() {
    static const std::set<std::string> s = {"and", "or", "but"};
    return s;
}

const std::set<std::string>& adverbs() {
    static const std::set<std::string> s = {
        "very",    "quite",   "always", "often",   "sometimes", "quickly", "slowly",
        "carefully", "loudly", "quietly", "gently", "early",    "late",    "soon",
        "here",    "there",   "outside", "inside", "upstairs",  "together", "again",
        "well",    "hard",    "never"};
    return s;
}

const std::set<std::string>& adjectives() {
    static const std::set<std::string> s = {
        "happy",   "sad",     "tall",     "short",   "old",      "young",    "big",
        "small",   "red",     "blue",     "green",   "black",    "white",    "yellow",
        "brown",   "fast",    "slow",     "warm",    "cold",     "hot",      "new",
        "bright",  "dark",    "quiet",    "loud",    "clean",    "dirty",    "soft",
        "heavy",   "light",   "empty",    "full",    "cheap",    "friendly", "angry",
        "tired",   "hungry",  "busy",     "lazy",    "clever",   "brave",    "calm",
        "proud",   "kind",    "gentle",   "strong",  "weak",     "fresh",    "sweet",
        "wild",    "wooden",  "delicious", "wonderful", "terrible", "beautiful", "narrow",
        "wide",    "deep",    "smooth",   "good",    "bad",      "nice",     "fine",
        "great",   "ready",   "late",     "fun",     "famous",   "patient",  "careful",
        "long",    "colorful", "shiny",   "round",   "square",   "modern",   "ancient"};
    return s;
}

struct VerbEntry {
    std::string lemma;
    enum Kind { Base, Third, Past, Part, Ing } kind;
};

// lemma -> {past, participle}; everything else derived by suffix rules
const std::map<std::string, std::pair<std::string, std::string>>& irregulars() {
    static const std::map<std::string, std::pair<std::string, std::string>> t = {
        {"become", {"became", "become"}}, {"begin", {"began", "begun"}},
        {"blow", {"blew", "blown"}},      {"break", {"broke", "broken"}},
        {"bring", {"brought", "brought"}}, {"build", {"built", "built"}},
        {"buy", {"bought", "bought"}},    {"catch", {"caught", "caught"}},
        {"choose", {"chose", "chosen"}},  {"come", {"came", "come"}},
        {"do", {"did", "done"}},          {"draw", {"drew", "drawn"}},
        {"drink", {"drank", "drunk"}},    {"drive", {"drove", "driven"}},
        {"eat", {"ate", "eaten"}},        {"fall", {"fell", "fallen"}},
        {"feed", {"fed", "fed"}},         {"feel", {"felt", "felt"}},
        {"find", {"found", "found"}},     {"fly", {"flew", "flown"}},
        {"forget", {"forgot", "forgotten"}}, {"get", {"got", "gotten"}},
        {"give", {"gave", "given"}},      {"go", {"went", "gone"}},
        {"grow", {"grew", "grown"}},      {"have", {"had", "had"}},
        {"hear", {"heard", "heard"}},     {"hide", {"hid", "hidden"}},
        {"hold", {"held", "held"}},       {"keep", {"kept", "kept"}},
        {"know", {"knew", "known"}},      {"lead", {"led", "led"}},
        {"leave", {"left", "left"}},      {"lose", {"lost", "lost"}},
        {"make", {"made", "made"}},       {"meet", {"met", "met"}},
        {"pay", {"paid", "paid"}},        {"put", {"put", "put"}},
        {"read", {"read", "read"}},       {"ride", {"rode", "ridden"}},
        {"ring", {"rang", "rung"}},       {"rise", {"rose", "risen"}},
        {"run", {"ran", "run"}},          {"say", {"said", "said"}},
        {"see", {"saw", "seen"}},         {"sell", {"sold", "sold"}},
        {"send", {"sent", "sent"}},       {"sing", {"sang", "sung"}},
        {"sit", {"sat", "sat"}},          {"sleep", {"slept", "slept"}},
        {"speak", {"spoke", "spoken"}},   {"stand", {"stood", "stood"}},
        {"swim", {"swam", "swum"}},       {"take", {"took", "taken"}},
        {"teach", {"taught", "taught"}},  {"tell", {"told", "told"}},
        {"think", {"thought", "thought"}}, {"throw", {"threw", "thrown"}},
        {"wake", {"woke", "woken"}},      {"wear", {"wore", "worn"}},
        {"win", {"won", "won"}},          {"write", {"wrote", "written"}}};
    return t;
}

const std::vector<std::string>& regular_lemmas() {
    static const std::vector<std::string> v = {
        "walk",   "jump",   "play",    "like",    "open",    "close",   "chase",  "kick",
        "push",   "pull",   "lift",    "drop",    "carry",   "clean",   "wash",   "cook",
        "bake",   "paint",  "fix",     "repair",  "plant",   "water",   "visit",  "watch",
        "help",   "train",  "practice", "study",  "learn",   "finish",  "start",  "enjoy",
        "love",   "hate",   "need",    "want",    "prefer",  "own",     "call",   "ask",
        "answer", "talk",   "listen",  "look",    "move",    "stay",    "live",   "work",
        "rest",   "smile",  "laugh",   "cry",     "shout",   "whisper", "travel", "climb",
        "dance",  "count",  "collect", "organize", "arrange", "pack",    "deliver", "receive",
        "exercise", "happen", "rain",  "wait",    "park",    "shop",    "jog",    "hike",
        "stretch", "juggle", "whistle", "hum",    "skate",   "sail",    "row",    "share",
        "follow", "greet",  "invite",  "prepare", "serve",   "taste",   "measure", "weigh",
        "solve",  "explain", "describe", "remember"};
    return v;
}

bool is_vowel(char c) { return std::string("aeiou").find(c) != std::string::npos; }

bool doubles_final(const std::string& lemma) {
    // Short consonant-vowel-consonant stems double the final consonant.
    const size_t n = lemma.size();
    if (n < 3 || n > 4) return false;
    char a = lemma[n - 3], b = lemma[n - 2], c = lemma[n - 1];
    return !is_vowel(a) && is_vowel(b) && !is_vowel(c) && std::string("wxy").find(c) == std::string::npos;
}

std::string third_of(const std::string& lemma) {
    const size_t n = lemma.size();
    char last = lemma[n - 1];
    if (last == 's' || last == 'x' || last == 'z' || last == 'o' ||
        (n > 1 && (lemma.compare(n - 2, 2, "ch") == 0 || lemma.compare(n - 2, 2, "sh") == 0)))
        return lemma + "es";
    if (last == 'y' && n > 1 && !is_vowel(lemma[n - 2]))
        return lemma.substr(0, n - 1) + "ies";
    return lemma + "s";
}

std::string past_of(const std::string& lemma) {
    const size_t n = lemma.size();
    if (lemma[n - 1] == 'e') return lemma + "d";
    if (lemma[n - 1] == 'y' && n > 1 && !is_vowel(lemma[n - 2]))
        return lemma.substr(0, n - 1) + "ied";
    if (doubles_final(lemma)) return lemma + lemma[n - 1] + "ed";
    return lemma + "ed";
}

std::string ing_of(const std::string& lemma) {
    const size_t n = lemma.size();
    if (lemma[n - 1] == 'e' && n > 2 && lemma[n - 2] != 'e') return lemma.substr(0, n - 1) + "ing";
    if (doubles_final(lemma)) return lemma + lemma[n - 1] + "ing";
    return lemma + "ing";
}

const std::map<std::string, VerbEntry>& verb_table() {
    static const std::map<std::string, VerbEntry> table = [] {
        std::map<std::string, VerbEntry> t;
        auto put = [&](const std::string& form, const std::string& lemma, VerbEntry::Kind k) {
            t.emplace(form, VerbEntry{lemma, k});
        };
        auto add_lemma = [&](const std::string& lemma, const std::string& past,
                             const std::string& part) {
            put(lemma, lemma, VerbEntry::Base);
            put(third_of(lemma), lemma, VerbEntry::Third);
            put(past, lemma, VerbEntry::Past);
            if (part != past) put(part, lemma, VerbEntry::Part);
            put(ing_of(lemma), lemma, VerbEntry::Ing);
        };
        for (const auto& lemma : regular_lemmas()) add_lemma(lemma, past_of(lemma), past_of(lemma));
        for (const auto& [lemma, forms] : irregulars()) add_lemma(lemma, forms.first, forms.second);
        return t;
    }();
    return table;
}

const std::map<std::string, std::string>& aux_lemmas() {
    static const std::map<std::string, std::string> t = {
        {"am", "be"},   {"is", "be"},    {"are", "be"},  {"was", "be"},   {"were", "be"},
        {"be", "be"},   {"been", "be"},  {"being", "be"}, {"has", "have"}, {"have", "have"},
        {"had", "have"}, {"having", "have"}, {"do", "do"}, {"does", "do"}, {"did", "do"},
        {"ca", "can"},  {"wo", "will"},  {"sha", "shall"}, {"ai", "be"}};
    return t;
}

std::vector<std::string> split_tokens(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string word;
    while (ss >> word) {
        // peel leading punctuation
        size_t start = 0;
        while (start < word.size() && is_punct_tok(std::string(1, word[start]))) {
            out.emplace_back(1, word[start]);
            ++start;
        }
        size_t end = word.size();
        std::vector<std::string> trailing;
        while (end > start && is_punct_tok(std::string(1, word[end - 1]))) {
            trailing.emplace(trailing.begin(), std::string(1, word[end - 1]));
            --end;
        }
        std::string core = word.substr(start, end - start);
        if (!core.empty()) {
            const std::string lc = lower(core);
            if (lc.size() > 3 && lc.compare(lc.size() - 3, 3, "n't") == 0) {
                out.push_back(core.substr(0, core.size() - 3));
                out.push_back(core.substr(core.size() - 3));
            } else {
                out.push_back(core);
            }
        }
        for (auto& p : trailing) out.push_back(std::move(p));
    }
    return out;
}

struct Tag {
    std::string upos;
    std::string lemma;
    std::map<std::string, std::string> feats;
};

void add_tense_feats(Tag& tag, VerbEntry::Kind kind) {
    switch (kind) {
        case VerbEntry::Base:
            tag.feats["VerbForm"] = "Fin";
            tag.feats["Tense"] = "Pres";
            break;
        case VerbEntry::Third:
            tag.feats["VerbForm"] = "Fin";
            tag.feats["Tense"] = "Pres";
            tag.feats["Person"] = "3";
            tag.feats["Number"] = "Sing";
            break;
        case VerbEntry::Past:
            tag.feats["VerbForm"] = "Fin";
            tag.feats["Tense"] = "Past";
            break;
        case VerbEntry::Part:
            tag.feats["VerbForm"] = "Part";
            tag.feats["Tense"] = "Past";
            break;
        case VerbEntry::Ing:
            tag.feats["VerbForm"] = "Ger";
            break;
    }
}

Tag tag_word(const std::string& form, size_t index) {
    const std::string lc = lower(form);
    Tag tag;
    tag.lemma = lc;
    if (is_punct_tok(form)) {
        tag.upos = "PUNCT";
        return tag;
    }
    if (lc == "not" || lc == "n't") {
        tag.upos = "PART";
        tag.lemma = "not";
        return tag;
    }
    if (be_forms().count(lc) || lc == "ai") {
        tag.upos = "AUX";
        tag.lemma = "be";
        if (lc == "is" || lc == "am" || lc == "ai") {
            tag.feats = {{"Tense", "Pres"}, {"VerbForm", "Fin"}};
            if (lc != "am") tag.feats.insert({{"Person", "3"}, {"Number", "Sing"}});
        } else if (lc == "are") {
            tag.feats = {{"Tense", "Pres"}, {"VerbForm", "Fin"}};
        } else if (lc == "was" || lc == "were") {
            tag.feats = {{"Tense", "Past"}, {"VerbForm", "Fin"}};
        }
        return tag;
    }
    if (modals().count(lc) || lc == "ca" || lc == "wo" || lc == "sha") {
        tag.upos = "AUX";
        auto it = aux_lemmas().find(lc);
        tag.lemma = it != aux_lemmas().end() ? it->second : lc;
        tag.feats = {{"VerbForm", "Fin"}};
        return tag;
    }
    if (lc == "do" || lc == "does" || lc == "did" || lc == "has" || lc == "have" || lc == "had") {
        tag.upos = "AUX";  // demoted to VERB by the structure pass when no verb follows
        tag.lemma = aux_lemmas().at(lc);
        if (lc == "did" || lc == "had")
            tag.feats = {{"Tense", "Past"}, {"VerbForm", "Fin"}};
        else if (lc == "does" || lc == "has")
            tag.feats = {{"Tense", "Pres"}, {"Person", "3"}, {"Number", "Sing"}, {"VerbForm", "Fin"}};
        else
            tag.feats = {{"Tense", "Pres"}, {"VerbForm", "Fin"}};
        return tag;
    }
    if (dets().count(lc)) {
        tag.upos = "DET";
        return tag;
    }
    if (pronouns().count(lc)) {
        tag.upos = "PRON";
        tag.lemma = lc == "i" ? "I" : lc;
        return tag;
    }
    if (preps().count(lc)) {
        tag.upos = "ADP";
        return tag;
    }
    if (conjs().count(lc)) {
        tag.upos = "CCONJ";
        return tag;
    }
    if (adjectives().count(lc)) {
        tag.upos = "ADJ";
        return tag;
    }
    if (adverbs().count(lc) || (lc.size() > 3 && lc.compare(lc.size() - 2, 2, "ly") == 0)) {
        tag.upos = "ADV";
        return tag;
    }
    auto verb = verb_table().find(lc);
    if (verb != verb_table().end()) {
        tag.upos = "VERB";
        tag.lemma = verb->second.lemma;
        add_tense_feats(tag, verb->second.kind);
        return tag;
    }
    // Default nominal; mid-sentence capitalization marks a proper noun.
    tag.upos = (index > 0 && std::isupper(static_cast<unsigned char>(form[0]))) ? "PROPN" : "NOUN";
    return tag;
}

}  // namespace

ParsedSentence heuristic_parse(const std::string& sentence) {
    ParsedSentence out;
    out.text = sentence;
    auto forms = split_tokens(sentence);
    if (forms.empty()) throw InputError("heuristic_parse: empty sentence");

    std::vector<Tag> tags;
    tags.reserve(forms.size());
    for (size_t i = 0; i < forms.size(); ++i) tags.push_back(tag_word(forms[i], i));

    // Lexical-verb candidates directly after a determiner or adjective are
    // nouns ("the play", "a walk").
    for (size_t i = 1; i < forms.size(); ++i)
        if (tags[i].upos == "VERB" &&
            (tags[i - 1].upos == "DET" || tags[i - 1].upos == "ADJ")) {
            tags[i].upos = "NOUN";
            tags[i].lemma = lower(forms[i]);
            tags[i].feats.clear();
        }

    const int n = static_cast<int>(forms.size());
    auto is_aux_like = [&](int i) { return tags[i].upos == "AUX"; };
    auto is_verb = [&](int i) { return tags[i].upos == "VERB"; };
    auto next_verbal = [&](int from) {
        for (int j = from; j < n; ++j) {
            if (is_verb(j) || is_aux_like(j)) return j;
            if (tags[j].upos == "PART" || tags[j].upos == "ADV") continue;  // skip "not", adverbs
            break;
        }
        return -1;
    };

    int anchor = -1;
    for (int i = 0; i < n; ++i)
        if (is_aux_like(i) || is_verb(i)) {
            anchor = i;
            break;
        }

    int root = -1;
    std::vector<int> aux;           // indices attached as aux
    int cop = -1;                   // copula index, attached as cop
    if (anchor >= 0) {
        if (is_verb(anchor)) {
            root = anchor;
            if (anchor == 0 && tags[anchor].feats.count("Tense") &&
                tags[anchor].feats["VerbForm"] == "Fin" && lower(forms[anchor]) == tags[anchor].lemma)
                tags[anchor].feats["Mood"] = "Imp";
        } else {
            // Chain of auxiliaries ending in a lexical verb, or a copula.
            int j = anchor;
            std::vector<int> chain = {j};
            int nxt = next_verbal(j + 1);
            while (nxt >= 0 && is_aux_like(nxt)) {
                chain.push_back(nxt);
                nxt = next_verbal(nxt + 1);
            }
            if (nxt >= 0) {
                root = nxt;
                aux = chain;
                if (tags[root].feats.count("Tense") == 0 ||
                    std::find_if(chain.begin(), chain.end(), [&](int c) {
                        return tags[c].lemma == "can" || tags[c].lemma == "will" ||
                               modals().count(tags[c].lemma) > 0;
                    }) != chain.end())
                    tags[root].feats["VerbForm"] = "Inf";
            } else if (tags[anchor].lemma == "be") {
                // Copular clause: predicate head is the last content word.
                int pred = -1;
                for (int k = n - 1; k > anchor; --k) {
                    const std::string& u = tags[k].upos;
                    if (u == "NOUN" || u == "PROPN" || u == "ADJ" || u == "PRON" || u == "NUM" ||
                        u == "ADV") {
                        pred = k;
                        break;
                    }
                }
                if (pred >= 0) {
                    root = pred;
                    cop = anchor;
                    for (size_t c = 1; c < chain.size(); ++c) aux.push_back(chain[c]);
                } else {
                    root = anchor;  // bare "be" clause
                    tags[root].upos = "VERB";
                }
            } else {
                // "do"/"have" with no verb after them act as main verbs.
                root = anchor;
                tags[root].upos = "VERB";
                for (size_t c = 1; c < chain.size(); ++c) aux.push_back(chain[c]);
            }
        }
    }

    if (root < 0) {
        // Verbless fragment: head everything at the last content token so the
        // parse is well-formed; negate() reports NoFiniteVerb.
        for (int k = n - 1; k >= 0; --k)
            if (tags[k].upos != "PUNCT") {
                root = k;
                break;
            }
        if (root < 0) root = 0;
    }

    out.tokens.resize(n);
    for (int i = 0; i < n; ++i) {
        ParsedToken& t = out.tokens[i];
        t.form = forms[i];
        t.lemma = tags[i].lemma;
        t.upos = tags[i].upos;
        t.feats = tags[i].feats;
        if (i == root) {
            t.head = 0;
            t.deprel = "root";
        } else if (std::find(aux.begin(), aux.end(), i) != aux.end()) {
            t.head = root + 1;
            t.deprel = "aux";
        } else if (i == cop) {
            t.head = root + 1;
            t.deprel = "cop";
        } else if (tags[i].upos == "PART" && tags[i].lemma == "not") {
            t.head = root + 1;
            t.deprel = "neg";
        } else if (tags[i].upos == "PUNCT") {
            t.head = root + 1;
            t.deprel = "punct";
        } else {
            t.head = root + 1;
            t.deprel = "dep";
        }
        const bool next_attaches =
            i + 1 < n && (is_punct_tok(forms[i + 1]) || lower(forms[i + 1]) == "n't");
        t.space_after = !next_attaches;
    }
    return out;
}

std::vector<ParsedSentence> heuristic_parse_corpus(const std::vector<std::string>& sentences) {
    std::vector<ParsedSentence> out;
    out.reserve(sentences.size());
    for (const auto& s : sentences) out.push_back(heuristic_parse(s));
    return out;
}

std::string verb_third(const std::string& lemma) { return third_of(lemma); }

std::string verb_past(const std::string& lemma) {
    auto it = irregulars().find(lemma);
    return it != irregulars().end() ? it->second.first : past_of(lemma);
}

std::string verb_participle(const std::string& lemma) {
    auto it = irregulars().find(lemma);
    return it != irregulars().end() ? it->second.second : past_of(lemma);
}

std::string verb_ing(const std::string& lemma) { return ing_of(lemma); }

}  // namespace sncse::neg

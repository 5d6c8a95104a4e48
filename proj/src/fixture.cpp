#include "sncse/fixture.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "sncse/negation.hpp"
#include "sncse/rng.hpp"
#include "sncse/tagger.hpp"

namespace sncse::data {

using num::Rng;

namespace {

struct Subject {
    const char* text;
    bool plural;
};

const std::vector<Subject>& subjects() {
    static const std::vector<Subject> s = {
        {"a man", false},        {"a woman", false},       {"the boy", false},
        {"the girl", false},     {"the dog", false},       {"the cat", false},
        {"the teacher", false},  {"a chef", false},        {"the musician", false},
        {"an old man", false},   {"a young woman", false}, {"the little girl", false},
        {"the farmer", false},   {"a nurse", false},       {"the driver", false},
        {"she", false},          {"he", false},            {"the bird", false},
        {"the children", true},  {"two men", true},        {"the players", true},
        {"the dogs", true},      {"they", true},           {"the kids", true},
        {"the students", true},  {"the neighbors", true},  {"the dancers", true},
        {"the workers", true},
    };
    return s;
}

const std::vector<std::string>& transitive_verbs() {
    static const std::vector<std::string> v = {
        "chase", "kick",  "push",  "pull",  "carry", "clean", "wash",  "cook",
        "bake",  "paint", "fix",   "plant", "water", "visit", "watch", "help",
        "teach", "catch", "buy",   "sell",  "bring", "hold",  "find",  "keep",
        "make",  "take",  "eat",   "read",  "write", "sing",  "draw",  "build",
        "drive", "ride",  "throw", "wear",  "win",   "choose", "drink", "feed",
        "hide",  "share", "follow", "greet", "invite", "prepare", "serve", "taste",
    };
    return v;
}

const std::vector<std::string>& intransitive_verbs() {
    static const std::vector<std::string> v = {
        "run",   "walk",  "jump",   "swim", "dance", "sleep", "smile",
        "laugh", "travel", "climb", "jog",  "hike",  "rest",  "work",
        "shout", "whisper", "exercise", "stretch", "wait",
    };
    return v;
}

const std::vector<std::string>& objects() {
    static const std::vector<std::string> o = {
        "the ball",    "a sandwich", "the piano",  "a book",    "the garden",
        "the fence",   "a letter",   "the dishes", "a cake",    "the race",
        "the song",    "dinner",     "the car",    "a kite",    "the floor",
        "the horse",   "a picture",  "the guitar", "the apples", "tea",
        "the game",    "a basket",   "the table",  "the wall",  "a ladder",
        "the flowers", "breakfast",  "the boxes",
    };
    return o;
}

const std::vector<std::string>& adjuncts() {
    static const std::vector<std::string> a = {
        "in the park",    "near the river",  "every morning", "after lunch",
        "on the weekend", "at the station",  "in the kitchen", "at night",
        "in the garden",  "on the porch",    "quickly",       "slowly",
        "carefully",      "quietly",         "together",      "outside",
        "in the yard",    "before breakfast",
    };
    return a;
}

const std::vector<std::string>& predicate_adjectives() {
    static const std::vector<std::string> a = {
        "happy", "tired",  "busy",   "proud", "calm",  "hungry", "quiet",
        "kind",  "clever", "brave",  "late",  "ready", "strong", "gentle",
        "loud",  "patient", "friendly", "careful",
    };
    return a;
}

const std::vector<std::string>& predicate_nouns() {
    static const std::vector<std::string> n = {
        "a doctor", "a teacher", "a dancer", "a farmer", "an artist",
        "a singer", "a writer",  "a runner", "a painter", "a gardener",
    };
    return n;
}

const std::vector<std::string>& places() {
    static const std::vector<std::string> p = {
        "in the park",   "near the river", "at the station", "in the kitchen",
        "on the porch",  "in the garden",  "at the market",  "in the yard",
        "on the bridge", "at the school",
    };
    return p;
}

const std::vector<std::string>& modals() {
    static const std::vector<std::string> m = {"can", "should", "will", "must", "might", "could"};
    return m;
}

std::string capitalize(std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
}

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& xs) {
    return xs[rng.below(xs.size())];
}

std::string make_sentence(Rng& rng) {
    const Subject& subj = pick(rng, subjects());
    const bool plural = subj.plural;
    const int frame = static_cast<int>(rng.below(100));
    const bool with_adjunct = rng.uniform() < 0.55;
    const std::string adjunct = with_adjunct ? " " + pick(rng, adjuncts()) : "";

    std::string body;
    if (frame < 18) {
        // progressive
        const bool trans = rng.uniform() < 0.7;
        const std::string verb = trans ? pick(rng, transitive_verbs()) : pick(rng, intransitive_verbs());
        const std::string be = rng.uniform() < 0.7 ? (plural ? "are" : "is") : (plural ? "were" : "was");
        body = std::string(subj.text) + " " + be + " " + neg::verb_ing(verb) +
               (trans ? " " + pick(rng, objects()) : "") + adjunct;
    } else if (frame < 36) {
        // simple past
        const bool trans = rng.uniform() < 0.7;
        const std::string verb = trans ? pick(rng, transitive_verbs()) : pick(rng, intransitive_verbs());
        body = std::string(subj.text) + " " + neg::verb_past(verb) +
               (trans ? " " + pick(rng, objects()) : "") + adjunct;
    } else if (frame < 52) {
        // simple present
        const bool trans = rng.uniform() < 0.7;
        const std::string verb = trans ? pick(rng, transitive_verbs()) : pick(rng, intransitive_verbs());
        const std::string form = plural ? verb : neg::verb_third(verb);
        body = std::string(subj.text) + " " + form + (trans ? " " + pick(rng, objects()) : "") +
               adjunct;
    } else if (frame < 64) {
        // modal
        const bool trans = rng.uniform() < 0.7;
        const std::string verb = trans ? pick(rng, transitive_verbs()) : pick(rng, intransitive_verbs());
        body = std::string(subj.text) + " " + pick(rng, modals()) + " " + verb +
               (trans ? " " + pick(rng, objects()) : "") + adjunct;
    } else if (frame < 74) {
        // perfect
        const std::string verb = pick(rng, transitive_verbs());
        const std::string have = rng.uniform() < 0.8 ? (plural ? "have" : "has") : "had";
        body = std::string(subj.text) + " " + have + " " + neg::verb_participle(verb) + " " +
               pick(rng, objects()) + adjunct;
    } else if (frame < 84) {
        // copula + adjective
        const std::string be = rng.uniform() < 0.7 ? (plural ? "are" : "is") : (plural ? "were" : "was");
        body = std::string(subj.text) + " " + be + " " + pick(rng, predicate_adjectives());
    } else if (frame < 90) {
        // copula + noun phrase (singular subjects only read naturally)
        const Subject& s2 = subjects()[rng.below(18)];  // singular block
        body = std::string(s2.text) + " is " + pick(rng, predicate_nouns());
    } else if (frame < 95) {
        // copula + place
        const std::string be = plural ? "are" : "is";
        body = std::string(subj.text) + " " + be + " " + pick(rng, places());
    } else if (frame < 99) {
        // pre-negated (keeps the R1 path exercised in training data)
        const bool contraction = rng.uniform() < 0.4;
        if (contraction) {
            const std::string verb = pick(rng, transitive_verbs());
            body = std::string(subj.text) + (plural ? " aren't " : " isn't ") +
                   neg::verb_ing(verb) + " " + pick(rng, objects());
        } else {
            body = std::string(subj.text) + (plural ? " are not " : " is not ") +
                   pick(rng, predicate_adjectives());
        }
    } else {
        // verbless fragment; negate_corpus records these as skips
        static const std::vector<std::string> fragments = {
            "a red car", "the tall trees", "a quiet street", "the bright moon"};
        body = pick(rng, fragments);
    }
    return capitalize(body) + ".";
}

double jitter(Rng& rng, double amount) { return (rng.uniform() * 2.0 - 1.0) * amount; }

std::string swap_determiner(const std::string& s) {
    if (s.rfind("A ", 0) == 0) return "The " + s.substr(2);
    if (s.rfind("The ", 0) == 0) return "A " + s.substr(4);
    if (s.rfind("An ", 0) == 0) return "The " + s.substr(3);
    return s;
}

std::string drop_adjunct(const std::string& s) {
    for (const auto& a : adjuncts()) {
        auto pos = s.find(" " + a + ".");
        if (pos != std::string::npos) return s.substr(0, pos) + ".";
    }
    return s;
}

}  // namespace

std::vector<std::string> generate_sentences(int count, uint64_t seed) {
    Rng rng(num::substream(seed, "fixture-sentences"));
    std::set<std::string> seen;
    std::vector<std::string> out;
    int guard = 0;
    while (static_cast<int>(out.size()) < count) {
        if (++guard > count * 200) throw Error("fixture generator exhausted its grammar space");
        std::string s = make_sentence(rng);
        if (seen.insert(s).second) out.push_back(std::move(s));
    }
    return out;
}

std::vector<ScoredPair> generate_sts_pairs(const std::vector<std::string>& pool, int count,
                                           uint64_t seed) {
    if (pool.size() < 32) throw InputError("generate_sts_pairs: pool too small");
    Rng rng(num::substream(seed, "fixture-sts"));
    std::vector<ScoredPair> out;
    std::set<std::pair<std::string, std::string>> seen;

    auto negation_of = [](const std::string& s) -> std::string {
        try {
            return neg::negate(neg::heuristic_parse(s)).text;
        } catch (const neg::NegationError&) {
            return "";
        }
    };
    auto push = [&](std::string a, std::string b, double score) {
        if (a == b && score < 5.0) return;
        score = std::min(5.0, std::max(0.0, score));
        if (seen.insert({a, b}).second) out.push_back({std::move(a), std::move(b), score});
    };

    int guard = 0;
    while (static_cast<int>(out.size()) < count) {
        if (++guard > count * 400) throw Error("sts pair generator stalled");
        const std::string& s = pool[rng.below(pool.size())];
        switch (rng.below(6)) {
            case 0:  // identical
                push(s, s, 5.0);
                break;
            case 1: {  // light paraphrase
                std::string t = swap_determiner(s);
                if (t == s) t = drop_adjunct(s);
                if (t != s) push(s, t, 4.2 + jitter(rng, 0.15));
                break;
            }
            case 2: {  // same opening (subject + verb region), different tail
                auto cut = s.find(' ', s.find(' ') + 1);
                if (cut == std::string::npos) break;
                const std::string head = s.substr(0, cut);
                for (int tries = 0; tries < 20; ++tries) {
                    const std::string& t = pool[rng.below(pool.size())];
                    if (t != s && t.rfind(head, 0) == 0) {
                        push(s, t, 2.9 + jitter(rng, 0.25));
                        break;
                    }
                }
                break;
            }
            case 3: {  // negation pair
                std::string n = negation_of(s);
                if (!n.empty()) push(s, n, 1.6 + jitter(rng, 0.25));
                break;
            }
            case 4: {  // shared single word somewhere, otherwise unrelated
                const std::string& t = pool[rng.below(pool.size())];
                if (t != s) push(s, t, 0.9 + jitter(rng, 0.3));
                break;
            }
            default: {  // unrelated
                const std::string& t = pool[rng.below(pool.size())];
                if (t != s) push(s, t, 0.3 + jitter(rng, 0.25));
                break;
            }
        }
    }
    return out;
}

}  // namespace sncse::data

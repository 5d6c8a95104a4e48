#include "doctest.h"

#include <fstream>
#include <sstream>

#include "sncse/negation.hpp"
#include "sncse/tagger.hpp"

using namespace sncse;
using namespace sncse::neg;

namespace {

struct GoldenRow {
    std::string sentence;
    std::string expected;  // negated text or "<skip:Reason>"
};

std::vector<GoldenRow> load_golden(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    std::vector<GoldenRow> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto tab = line.find('\t');
        REQUIRE(tab != std::string::npos);
        rows.push_back({line.substr(0, tab), line.substr(tab + 1)});
    }
    return rows;
}

int count_not_tokens(const std::string& text) {
    int count = 0;
    std::stringstream ss(text);
    std::string w;
    while (ss >> w) {
        if (w == "not") ++count;
        if (w.size() > 3 && w.compare(w.size() - 3, 3, "n't") == 0) ++count;
    }
    return count;
}

}  // namespace

TEST_CASE("golden corpus: all 50 rows match") {
    auto rows = load_golden("fixture/negation_golden.tsv");
    REQUIRE(rows.size() == 50);
    int matched = 0;
    for (const auto& row : rows) {
        ParsedSentence parse = heuristic_parse(row.sentence);
        std::string got;
        try {
            got = negate(parse).text;
        } catch (const NegationError& e) {
            got = std::string("<skip:") + reason_id(e.reason) + ">";
        }
        INFO(row.sentence << " -> " << got << " (expected " << row.expected << ")");
        CHECK(got == row.expected);
        if (got == row.expected) ++matched;
    }
    CHECK(matched >= 48);

    // The canonical do-support example must come out exactly.
    auto worked = negate(heuristic_parse("Tom and Jerry became good friends."));
    CHECK(worked.text.find("did not become good friends") != std::string::npos);
    CHECK(worked.rule == Rule::R4_DoSupport);
}

TEST_CASE("rule identifiers and negator positions") {
    auto r2 = negate(heuristic_parse("A man is doing pull-ups."));
    CHECK(r2.rule == Rule::R2_AfterAuxiliary);
    CHECK(r2.text == "A man is not doing pull-ups.");
    CHECK(r2.position == 3);  // a(0) man(1) is(2) not(3)

    auto r3 = negate(heuristic_parse("He can swim."));
    CHECK(r3.rule == Rule::R3_AfterModal);

    auto r4 = negate(heuristic_parse("She runs."));
    CHECK(r4.rule == Rule::R4_DoSupport);
    CHECK(r4.text == "She does not run.");

    auto r1 = negate(heuristic_parse("He is not happy."));
    CHECK(r1.rule == Rule::R1_RemoveExisting);
    CHECK(r1.text == "He is happy.");
}

TEST_CASE("insertion rules add exactly one negation token") {
    const std::vector<std::string> sentences = {
        "The sky is blue.",       "She has finished the race.", "He can swim.",
        "They play chess.",       "She ran to the store.",      "The cat sleeps.",
        "Open the door.",         "The kids are playing chess.",
    };
    for (const auto& s : sentences) {
        auto parse = heuristic_parse(s);
        auto result = negate(parse);
        INFO(s << " -> " << result.text);
        CHECK(count_not_tokens(result.text) == count_not_tokens(s) + 1);
        const int extra = result.rule == Rule::R4_DoSupport ? 2 : 1;
        CHECK(heuristic_parse(result.text).tokens.size() == parse.tokens.size() + extra);
    }
}

TEST_CASE("double negation recovers the original modulo do-support") {
    const std::vector<std::string> sentences = {
        "The sky is blue.", "A man is doing pull-ups.", "He can swim.",
        "She has finished the race.",
    };
    for (const auto& s : sentences) {
        auto once = negate(heuristic_parse(s));
        auto twice = negate(heuristic_parse(once.text));
        CHECK(twice.rule == Rule::R1_RemoveExisting);
        CHECK(twice.text == s);
    }
    // Do-support keeps its auxiliary after the flip; only lemmatization differs.
    auto once = negate(heuristic_parse("She runs."));
    auto twice = negate(heuristic_parse(once.text));
    CHECK(twice.text == "She does run.");
}

TEST_CASE("negate is deterministic") {
    auto parse = heuristic_parse("The dog chased the ball.");
    CHECK(negate(parse).text == negate(parse).text);
}

TEST_CASE("fragments raise NoFiniteVerb") {
    CHECK_THROWS_AS(negate(heuristic_parse("A red car.")), NegationError);
    try {
        negate(heuristic_parse("The tall trees near the river."));
        FAIL("expected NegationError");
    } catch (const NegationError& e) {
        CHECK(e.reason == NegationError::Reason::NoFiniteVerb);
    }
}

TEST_CASE("conllu: well-formed input, text comments, multiword ranges") {
    std::stringstream ss;
    ss << "# text = He isn't happy.\n"
       << "1\tHe\the\tPRON\t_\t_\t4\tnsubj\t_\t_\n"
       << "2-3\tisn't\t_\t_\t_\t_\t_\t_\t_\t_\n"
       << "2\tis\tbe\tAUX\t_\t_\t4\tcop\t_\tSpaceAfter=No\n"
       << "3\tn't\tnot\tPART\t_\t_\t4\tneg\t_\t_\n"
       << "4\thappy\thappy\tADJ\t_\t_\t0\troot\t_\tSpaceAfter=No\n"
       << "5\t.\t.\tPUNCT\t_\t_\t4\tpunct\t_\t_\n"
       << "\n"
       << "# text = She runs.\n"
       << "1\tShe\tshe\tPRON\t_\t_\t2\tnsubj\t_\t_\n"
       << "2\truns\trun\tVERB\t_\tNumber=Sing|Person=3|Tense=Pres|VerbForm=Fin\t0\troot\t_\tSpaceAfter=No\n"
       << "3\t.\t.\tPUNCT\t_\t_\t2\tpunct\t_\t_\n";
    auto result = read_conllu(ss, "test");
    REQUIRE(result.sentences.size() == 2);
    CHECK(result.skipped_missing_root == 0);
    CHECK(result.sentences[0].text == "He isn't happy.");
    CHECK(result.sentences[0].tokens.size() == 5);  // range line skipped
    CHECK(result.sentences[0].tokens[1].form == "is");

    // The range-token sentence negates via R1 on its parts.
    auto flip = negate(result.sentences[0]);
    CHECK(flip.text == "He is happy.");
    auto dosupport = negate(result.sentences[1]);
    CHECK(dosupport.text == "She does not run.");
}

TEST_CASE("conllu: external-parser 'wo'/'ca' contraction hosts expand on R1") {
    std::stringstream ss;
    ss << "1\tHe\the\tPRON\t_\t_\t4\tnsubj\t_\t_\n"
       << "2\two\twill\tAUX\t_\t_\t4\taux\t_\tSpaceAfter=No\n"
       << "3\tn't\tnot\tPART\t_\t_\t4\tadvmod\t_\t_\n"
       << "4\tswim\tswim\tVERB\t_\tVerbForm=Inf\t0\troot\t_\tSpaceAfter=No\n"
       << "5\t.\t.\tPUNCT\t_\t_\t4\tpunct\t_\t_\n";
    auto result = read_conllu(ss, "test");
    REQUIRE(result.sentences.size() == 1);
    auto flip = negate(result.sentences[0]);
    CHECK(flip.rule == Rule::R1_RemoveExisting);
    CHECK(flip.text == "He will swim.");
}

TEST_CASE("conllu: errors and edge cases") {
    std::stringstream empty;
    CHECK(read_conllu(empty, "test").sentences.empty());

    std::stringstream nine_cols;
    nine_cols << "1\tHe\the\tPRON\t_\t_\t2\tnsubj\t_\n";
    CHECK_THROWS_WITH_AS(read_conllu(nine_cols, "test"), doctest::Contains("test:1"), DataError);

    std::stringstream no_root;
    no_root << "1\tHe\the\tPRON\t_\t_\t2\tnsubj\t_\t_\n"
            << "2\truns\trun\tVERB\t_\t_\t1\tdep\t_\t_\n"
            << "\n"
            << "1\tShe\tshe\tPRON\t_\t_\t2\tnsubj\t_\t_\n"
            << "2\truns\trun\tVERB\t_\t_\t0\troot\t_\t_\n";
    auto result = read_conllu(no_root, "test");
    CHECK(result.sentences.size() == 1);
    CHECK(result.skipped_missing_root == 1);

    CHECK_THROWS_AS(load_conllu("/nonexistent/file.conllu"), IoError);
}

TEST_CASE("conllu round-trips through write_conllu") {
    auto parses = heuristic_parse_corpus({"A man is doing pull-ups.", "She runs."});
    std::stringstream ss;
    write_conllu(ss, parses);
    auto back = read_conllu(ss, "roundtrip");
    REQUIRE(back.sentences.size() == 2);
    for (size_t s = 0; s < 2; ++s) {
        CHECK(back.sentences[s].text == parses[s].text);
        REQUIRE(back.sentences[s].tokens.size() == parses[s].tokens.size());
        for (size_t i = 0; i < parses[s].tokens.size(); ++i) {
            CHECK(back.sentences[s].tokens[i].form == parses[s].tokens[i].form);
            CHECK(back.sentences[s].tokens[i].head == parses[s].tokens[i].head);
            CHECK(back.sentences[s].tokens[i].feats == parses[s].tokens[i].feats);
        }
    }
}

TEST_CASE("parsed sentences re-concatenate to their raw text") {
    for (const auto& s : {"He isn't happy.", "Tom and Jerry became good friends.",
                          "The cat is on the mat."}) {
        auto parse = heuristic_parse(s);
        CHECK(parse.detokenize() == s);
    }
}

TEST_CASE("negate_corpus: pairs, skips, alignment") {
    std::vector<std::string> sentences = {"The sky is blue.", "A red car.", "She runs."};
    auto parses = heuristic_parse_corpus(sentences);
    auto result = negate_corpus(sentences, parses);
    REQUIRE(result.pairs.size() == 2);
    CHECK(result.pairs[0].original == "The sky is blue.");
    CHECK(result.pairs[0].negation == "The sky is not blue.");
    CHECK(result.pairs[1].negation == "She does not run.");
    REQUIRE(result.skips.size() == 1);
    CHECK(result.skips[0].line == 2);
    CHECK(result.skips[0].reason == "NoFiniteVerb");

    CHECK_THROWS_AS(negate_corpus({"one sentence"}, {}), InputError);

    auto empty = negate_corpus({}, {});
    CHECK(empty.pairs.empty());
    CHECK(empty.skips.empty());

    // --skip-negated drops already-negated sentences instead of flipping them.
    std::vector<std::string> neg_in = {"He is not happy.", "She runs."};
    auto skipped = negate_corpus(neg_in, heuristic_parse_corpus(neg_in), true);
    REQUIRE(skipped.pairs.size() == 1);
    CHECK(skipped.skips.size() == 1);
    CHECK(skipped.skips[0].reason == "AlreadyNegated");

    std::stringstream tsv;
    write_pairs_tsv(tsv, result);
    CHECK(tsv.str() == "The sky is blue.\tThe sky is not blue.\nShe runs.\tShe does not run.\n");
    std::stringstream report;
    write_skip_report_json(report, result);
    CHECK(report.str().find("\"reason\"") != std::string::npos);
    CHECK(report.str().find("NoFiniteVerb") != std::string::npos);
}

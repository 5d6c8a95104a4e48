#include "doctest.h"

#include <cmath>
#include <cstring>

#include "sncse/encoder.hpp"
#include "sncse/errors.hpp"
#include "sncse/gradient_suite.hpp"
#include "sncse/objectives.hpp"
#include "sncse/rng.hpp"

using namespace sncse;
using namespace sncse::enc;
using namespace sncse::num;

namespace {

EncoderDims tiny_dims(int vocab) {
    EncoderDims d;
    d.vocab_size = vocab;
    d.d_model = 16;
    d.n_heads = 2;
    d.n_layers = 2;
    d.ff_dim = 24;
    d.max_len = 24;
    return d;
}

Tensor encode_values(const EncoderParams& params, const std::vector<TemplatedSequence>& batch,
                     const EncodeOptions& opt) {
    Graph g;
    BoundParams bp = bind_params(g, params, false);
    Node* H = encode_batch(g, bp, params.dims, batch, opt);
    g.forward();
    return H->val;
}

}  // namespace

TEST_CASE("tokenizer: lowercase, whitespace, punctuation splits") {
    auto toks = tokenize("Hello, World!  It's fine.");
    std::vector<std::string> expected = {"hello", ",", "world", "!", "it", "'", "s", "fine", "."};
    CHECK(toks == expected);
}

TEST_CASE("prompt templates and mask positions") {
    Vocabulary v;
    v.add("hello");
    v.add("world");

    auto orig = v.apply_template("hello world", TemplateVariant::Original);
    REQUIRE(orig.ids.size() == 10);
    CHECK(v.token_of(orig.ids[0]) == "the");
    CHECK(v.token_of(orig.ids[1]) == "sentence");
    CHECK(v.token_of(orig.ids[2]) == ":");
    CHECK(v.token_of(orig.ids[3]) == "\"");
    CHECK(v.token_of(orig.ids[4]) == "hello");
    CHECK(v.token_of(orig.ids[5]) == "world");
    CHECK(v.token_of(orig.ids[6]) == "\"");
    CHECK(v.token_of(orig.ids[7]) == "means");
    CHECK(v.token_of(orig.ids[8]) == "[MASK]");
    CHECK(v.token_of(orig.ids[9]) == ".");
    CHECK(orig.mask_pos == 8);

    auto pos = v.apply_template("hello world", TemplateVariant::Positive);
    REQUIRE(pos.ids.size() == 10);
    CHECK(v.token_of(pos.ids[2]) == "of");
    CHECK(pos.mask_pos == 8);  // "of" replaces ":", so the slot does not move

    auto neg = v.apply_template("hello world", TemplateVariant::SoftNegative);
    CHECK(neg.ids == pos.ids);

    CHECK_THROWS_AS(v.apply_template("", TemplateVariant::Original), InputError);
    CHECK_THROWS_AS(v.apply_template("   ", TemplateVariant::Positive), InputError);
}

TEST_CASE("vocabulary: build with min frequency, save/load keeps ids stable") {
    std::vector<std::string> corpus = {"the cat sat", "the cat ran", "a dog ran"};
    Vocabulary v = Vocabulary::build(corpus, 2);
    CHECK(v.contains("cat"));
    CHECK(v.contains("ran"));
    CHECK(!v.contains("dog"));  // frequency 1
    CHECK(v.id_of("dog") == Vocabulary::kUnk);
    CHECK(v.id_of("[PAD]") == Vocabulary::kPad);
    CHECK(v.id_of("[MASK]") == Vocabulary::kMask);

    const std::string path = "/tmp/sncse_vocab_test.txt";
    v.save(path);
    Vocabulary w = Vocabulary::load(path);
    CHECK(w.size() == v.size());
    for (int i = 0; i < v.size(); ++i) CHECK(w.token_of(i) == v.token_of(i));
    std::remove(path.c_str());
}

TEST_CASE("init: deterministic per seed, head mismatch rejected") {
    EncoderDims dims = tiny_dims(20);
    EncoderParams a = EncoderParams::init(7, dims);
    EncoderParams b = EncoderParams::init(7, dims);
    EncoderParams c = EncoderParams::init(8, dims);

    auto ta = a.to_tensors(), tb = b.to_tensors();
    bool same = true;
    for (const auto& [name, t] : ta)
        if (std::memcmp(t.data(), tb.at(name).data(), t.numel() * sizeof(double)) != 0)
            same = false;
    CHECK(same);
    CHECK(std::memcmp(a.tok_emb.data(), c.tok_emb.data(),
                      a.tok_emb.numel() * sizeof(double)) != 0);

    EncoderDims bad = dims;
    bad.d_model = 64;
    bad.n_heads = 5;
    CHECK_THROWS_AS(EncoderParams::init(7, bad), ConfigError);
}

TEST_CASE("encode: determinism, dropout-seed positives, eval ignores seeds") {
    EncoderDims dims = tiny_dims(30);
    EncoderParams params = EncoderParams::init(42, dims);
    Vocabulary v;
    for (const char* w : {"a", "man", "is", "doing", "pull-ups"}) v.add(w);
    auto seq = v.apply_template("a man is doing pull-ups", TemplateVariant::Original);

    EncodeOptions train;
    train.training = true;
    train.dropout_rate = 0.1;
    train.seeds = {12345};

    Tensor h1 = encode_values(params, {seq}, train);
    Tensor h2 = encode_values(params, {seq}, train);
    CHECK(std::memcmp(h1.data(), h2.data(), h1.numel() * sizeof(double)) == 0);

    EncodeOptions train_other = train;
    train_other.seeds = {54321};
    Tensor h3 = encode_values(params, {seq}, train_other);
    std::vector<double> r1(h1.values()), r3(h3.values());
    CHECK(obj::cosine(r1, r3) < 1.0);

    EncodeOptions eval;
    eval.training = false;
    eval.dropout_rate = 0.1;  // rate set but inactive outside training
    Tensor e1 = encode_values(params, {seq}, eval);
    eval.seeds = {999};
    Tensor e2 = encode_values(params, {seq}, eval);
    CHECK(std::memcmp(e1.data(), e2.data(), e1.numel() * sizeof(double)) == 0);

    // Training readout differs from the evaluation bypass; keep_mlp restores it.
    EncodeOptions keep = eval;
    keep.keep_mlp = true;
    Tensor k1 = encode_values(params, {seq}, keep);
    bool same = std::memcmp(e1.data(), k1.data(), e1.numel() * sizeof(double)) == 0;
    CHECK(!same);
}

TEST_CASE("encode: padding invariance and batch permutation equivariance") {
    EncoderDims dims = tiny_dims(30);
    EncoderParams params = EncoderParams::init(3, dims);
    Vocabulary v;
    for (const char* w : {"one", "two", "three", "four", "five", "six", "seven"}) v.add(w);

    auto s1 = v.apply_template("one two", TemplateVariant::Original);
    auto s2 = v.apply_template("three four five six seven", TemplateVariant::Original);
    auto s3 = v.apply_template("six", TemplateVariant::Positive);

    EncodeOptions eval;
    Tensor alone = encode_values(params, {s1}, eval);
    Tensor padded = encode_values(params, {s1, s2}, eval);  // s1 padded to s2's length
    for (int j = 0; j < dims.d_model; ++j)
        CHECK(alone.at(0, j) == padded.at(0, j));

    Tensor abc = encode_values(params, {s1, s2, s3}, eval);
    Tensor cab = encode_values(params, {s3, s1, s2}, eval);
    for (int j = 0; j < dims.d_model; ++j) {
        CHECK(abc.at(0, j) == cab.at(1, j));
        CHECK(abc.at(1, j) == cab.at(2, j));
        CHECK(abc.at(2, j) == cab.at(0, j));
    }
}

TEST_CASE("encode: contract errors") {
    EncoderDims dims = tiny_dims(30);
    EncoderParams params = EncoderParams::init(3, dims);
    Graph g;
    BoundParams bp = bind_params(g, params, false);

    TemplatedSequence bad;
    bad.ids = {3, 4, 5};
    bad.mask_pos = 7;
    CHECK_THROWS_AS(encode_batch(g, bp, dims, {bad}, {}), ContractError);

    TemplatedSequence huge;
    for (int i = 0; i < dims.max_len + 1; ++i) huge.ids.push_back(3);
    huge.mask_pos = 0;
    CHECK_THROWS_AS(encode_batch(g, bp, dims, {huge}, {}), InputError);

    EncodeOptions train;
    train.training = true;
    train.dropout_rate = 0.1;  // seeds missing
    TemplatedSequence ok;
    ok.ids = {3, 4, 5};
    ok.mask_pos = 1;
    CHECK_THROWS_AS(encode_batch(g, bp, dims, {ok}, train), ContractError);
}

TEST_CASE("gradient suite: losses and pipeline below 1e-4") {
    // 3 trials here to keep the unit run snappy; the acceptance suite runs 10.
    auto results = run_gradient_suite(42, 3);
    REQUIRE(results.size() == 6);
    for (const auto& r : results) {
        INFO(r.name);
        CHECK(r.max_rel_err < 1e-4);
    }
}

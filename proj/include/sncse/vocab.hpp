#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace sncse::enc {

// Lowercase + whitespace tokenization with punctuation split off as separate
// tokens. No subword machinery at this scale.
std::vector<std::string> tokenize(const std::string& text);

enum class TemplateVariant { Original, Positive, SoftNegative };

struct TemplatedSequence {
    std::vector<int> ids;
    int mask_pos = -1;
};

class Vocabulary {
public:
    static constexpr int kPad = 0;
    static constexpr int kUnk = 1;
    static constexpr int kMask = 2;

    Vocabulary();

    // Frequency-filtered vocabulary over a corpus; reserved and template
    // tokens are always included.
    static Vocabulary build(const std::vector<std::string>& sentences, int min_freq = 2);

    int id_of(const std::string& token) const;  // kUnk when absent
    const std::string& token_of(int id) const;
    int size() const { return static_cast<int>(tokens_.size()); }
    bool contains(const std::string& token) const { return index_.count(token) > 0; }

    int add(const std::string& token);

    // One token per line, line number = id.
    void save(const std::string& path) const;
    static Vocabulary load(const std::string& path);

    // Wraps a sentence in its prompt: `the sentence : " X " means [MASK] .`
    // for the original and `the sentence of " X " means [MASK] .` for the
    // positive and soft-negative variants.
    TemplatedSequence apply_template(const std::string& sentence, TemplateVariant variant) const;

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int> index_;
};

}  // namespace sncse::enc

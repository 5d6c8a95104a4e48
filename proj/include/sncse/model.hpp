#pragma once

#include <string>
#include <vector>

#include "sncse/adamw.hpp"
#include "sncse/encoder.hpp"
#include "sncse/vocab.hpp"

namespace sncse::enc {

// Encoder parameters plus the vocabulary they were trained with; handles the
// checkpoint container layout (arch meta, "opt.m."/"opt.v." moment prefixes,
// vocabulary in a sibling file named by the meta).
struct Model {
    EncoderParams params;
    Vocabulary vocab;

    void save(const std::string& checkpoint_path, const num::AdamW* opt = nullptr) const;
    static Model load(const std::string& checkpoint_path, num::AdamW* opt = nullptr);

    // Evaluation-mode embeddings (dropout off; MLP bypassed unless keep_mlp).
    std::vector<std::vector<double>> embed(const std::vector<std::string>& sentences,
                                           TemplateVariant variant, bool keep_mlp = false) const;
};

}  // namespace sncse::enc

#include "sncse/model.hpp"

#include <filesystem>

#include "sncse/checkpoint.hpp"
#include "sncse/errors.hpp"

namespace fs = std::filesystem;

namespace sncse::enc {

using num::Checkpoint;

void Model::save(const std::string& checkpoint_path, const num::AdamW* opt) const {
    Checkpoint ck;
    const EncoderDims& d = params.dims;
    ck.meta["format"] = "sncse-encoder";
    ck.meta["arch.vocab_size"] = std::to_string(d.vocab_size);
    ck.meta["arch.d_model"] = std::to_string(d.d_model);
    ck.meta["arch.n_heads"] = std::to_string(d.n_heads);
    ck.meta["arch.n_layers"] = std::to_string(d.n_layers);
    ck.meta["arch.ff_dim"] = std::to_string(d.ff_dim);
    ck.meta["arch.max_len"] = std::to_string(d.max_len);

    for (const auto& [name, t] : params.to_tensors()) ck.tensors["param." + name] = t;

    if (opt) {
        ck.meta["opt.step"] = std::to_string(opt->step_count());
        ck.meta["opt.lr"] = std::to_string(opt->config().lr);
        ck.meta["opt.beta1"] = std::to_string(opt->config().beta1);
        ck.meta["opt.beta2"] = std::to_string(opt->config().beta2);
        ck.meta["opt.eps"] = std::to_string(opt->config().eps);
        ck.meta["opt.weight_decay"] = std::to_string(opt->config().weight_decay);
        for (const auto& [name, t] : opt->first_moments()) ck.tensors["opt.m." + name] = t;
        for (const auto& [name, t] : opt->second_moments()) ck.tensors["opt.v." + name] = t;
    }

    const fs::path path(checkpoint_path);
    const std::string vocab_name = path.filename().string() + ".vocab";
    ck.meta["vocab_file"] = vocab_name;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    vocab.save((path.parent_path() / vocab_name).string());
    ck.save(checkpoint_path);
}

Model Model::load(const std::string& checkpoint_path, num::AdamW* opt) {
    Checkpoint ck = Checkpoint::load(checkpoint_path);
    if (ck.meta.count("format") == 0 || ck.meta.at("format") != "sncse-encoder")
        throw DataError("'" + checkpoint_path + "' is not an encoder checkpoint");

    auto meta_int = [&](const std::string& key) {
        auto it = ck.meta.find(key);
        if (it == ck.meta.end()) throw DataError("checkpoint missing meta '" + key + "'");
        return std::stoi(it->second);
    };
    EncoderDims dims;
    dims.vocab_size = meta_int("arch.vocab_size");
    dims.d_model = meta_int("arch.d_model");
    dims.n_heads = meta_int("arch.n_heads");
    dims.n_layers = meta_int("arch.n_layers");
    dims.ff_dim = meta_int("arch.ff_dim");
    dims.max_len = meta_int("arch.max_len");

    std::map<std::string, num::Tensor> param_table;
    std::map<std::string, num::Tensor> m_table, v_table;
    for (const auto& [name, t] : ck.tensors) {
        if (name.rfind("param.", 0) == 0) param_table.emplace(name.substr(6), t);
        else if (name.rfind("opt.m.", 0) == 0) m_table.emplace(name.substr(6), t);
        else if (name.rfind("opt.v.", 0) == 0) v_table.emplace(name.substr(6), t);
    }

    Model model;
    model.params = EncoderParams::from_tensors(dims, param_table);

    const fs::path path(checkpoint_path);
    auto vfile = ck.meta.find("vocab_file");
    if (vfile == ck.meta.end()) throw DataError("checkpoint missing vocab_file meta");
    model.vocab = Vocabulary::load((path.parent_path() / vfile->second).string());
    if (model.vocab.size() != dims.vocab_size)
        throw DataError("vocabulary size disagrees with checkpoint architecture");

    if (opt) {
        auto step_it = ck.meta.find("opt.step");
        if (step_it != ck.meta.end())
            opt->restore(std::stoll(step_it->second), std::move(m_table), std::move(v_table));
    }
    return model;
}

std::vector<std::vector<double>> Model::embed(const std::vector<std::string>& sentences,
                                              TemplateVariant variant, bool keep_mlp) const {
    std::vector<std::vector<double>> out;
    out.reserve(sentences.size());
    const int chunk = 64;
    for (size_t start = 0; start < sentences.size(); start += chunk) {
        std::vector<TemplatedSequence> batch;
        for (size_t i = start; i < std::min(sentences.size(), start + chunk); ++i)
            batch.push_back(vocab.apply_template(sentences[i], variant));
        num::Graph g;
        BoundParams bp = bind_params(g, params, false);
        EncodeOptions opt;
        opt.training = false;
        opt.keep_mlp = keep_mlp;
        num::Node* H = encode_batch(g, bp, params.dims, batch, opt);
        g.forward();
        for (int r = 0; r < H->val.rows(); ++r) {
            std::vector<double> row(params.dims.d_model);
            for (int j = 0; j < params.dims.d_model; ++j) row[j] = H->val.at(r, j);
            out.push_back(std::move(row));
        }
    }
    return out;
}

}  // namespace sncse::enc

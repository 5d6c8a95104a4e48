#include "sncse/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <set>

#include "sncse/objectives.hpp"
#include "sncse/rng.hpp"

namespace sncse::eval {

std::vector<double> fractional_ranks(const std::vector<double>& xs) {
    const size_t n = xs.size();
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && xs[idx[j + 1]] == xs[idx[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

namespace {

void check_correlation_inputs(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw InputError("spearman: length mismatch");
    if (a.size() < 2) throw DataError("spearman: need at least 2 observations");
    auto constant = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
    };
    if (constant(a) || constant(b))
        throw DataError("spearman: correlation undefined for a constant input");
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        sa += a[i];
        sb += b[i];
        sab += a[i] * b[i];
        saa += a[i] * a[i];
        sbb += b[i] * b[i];
    }
    const double cov = n * sab - sa * sb;
    const double va = n * saa - sa * sa;
    const double vb = n * sbb - sb * sb;
    return cov / std::sqrt(va * vb);
}

}  // namespace

double spearman(const std::vector<double>& gold, const std::vector<double>& pred) {
    check_correlation_inputs(gold, pred);
    return pearson(fractional_ranks(gold), fractional_ranks(pred));
}

double spearman_closed_form(const std::vector<double>& gold, const std::vector<double>& pred) {
    check_correlation_inputs(gold, pred);
    auto rg = fractional_ranks(gold);
    auto re = fractional_ranks(pred);
    const double n = static_cast<double>(gold.size());
    double sum_sq = 0.0;
    for (size_t i = 0; i < rg.size(); ++i) sum_sq += (re[i] - rg[i]) * (re[i] - rg[i]);
    return 1.0 - sum_sq / ((n * n * n - n) / 6.0);
}

SubtaskReport score_subtask(const std::string& name, std::vector<PairResult> pairs) {
    SubtaskReport report;
    report.subtask = name;
    report.pairs = std::move(pairs);

    std::vector<double> gold, cos;
    gold.reserve(report.pairs.size());
    for (const auto& p : report.pairs) {
        gold.push_back(p.gold);
        cos.push_back(p.cosine);
    }
    auto rg = fractional_ranks(gold);
    auto re = fractional_ranks(cos);
    for (size_t i = 0; i < report.pairs.size(); ++i) {
        report.pairs[i].rank_gold = rg[i];
        report.pairs[i].rank_est = re[i];
        const double d = re[i] - rg[i];
        report.pairs[i].sq_rank_error = d * d;
    }
    report.rho = spearman(gold, cos);
    const double closed = spearman_closed_form(gold, cos);
    if (std::abs(closed - report.rho) > 1e-9) report.rho_closed_form = closed;
    return report;
}

EvalReport evaluate(const enc::Model& model, const data::STSData& sts, const std::string& split) {
    std::set<std::string> names;
    for (const auto& p : sts.pairs)
        if (p.split == split) names.insert(p.subtask);
    if (names.empty()) throw DataError("evaluate: no subtasks carry split '" + split + "'");

    EvalReport report;
    for (const auto& subtask : names) {
        auto pairs = sts.subtask_split(subtask, split);
        std::vector<std::string> all;
        all.reserve(pairs.size() * 2);
        for (const auto* p : pairs) {
            all.push_back(p->sentence1);
            all.push_back(p->sentence2);
        }
        auto embeddings = model.embed(all, enc::TemplateVariant::Original);

        std::vector<PairResult> rows;
        int excluded = 0;
        for (size_t i = 0; i < pairs.size(); ++i) {
            PairResult r;
            r.sentence1 = pairs[i]->sentence1;
            r.sentence2 = pairs[i]->sentence2;
            r.gold = pairs[i]->gold;
            try {
                r.cosine = obj::cosine(embeddings[2 * i], embeddings[2 * i + 1]);
            } catch (const DegenerateInputError&) {
                ++excluded;
                continue;
            }
            rows.push_back(std::move(r));
        }
        SubtaskReport sub = score_subtask(subtask, std::move(rows));
        sub.excluded_pairs = excluded;
        report.subtasks.push_back(std::move(sub));
    }
    double sum = 0.0;
    for (const auto& s : report.subtasks) sum += s.rho;
    report.average_rho = sum / static_cast<double>(report.subtasks.size());
    return report;
}

nlohmann::json EvalReport::to_json() const {
    nlohmann::json j;
    j["average_rho"] = average_rho;
    j["subtasks"] = nlohmann::json::array();
    for (const auto& s : subtasks) {
        nlohmann::json js;
        js["subtask"] = s.subtask;
        js["rho"] = s.rho;
        if (s.rho_closed_form) js["rho_closed_form"] = *s.rho_closed_form;
        js["pairs"] = s.pairs.size();
        js["excluded_pairs"] = s.excluded_pairs;
        j["subtasks"].push_back(std::move(js));
    }
    return j;
}

std::vector<SubtaskErrors> error_analysis(const EvalReport& report, int k) {
    if (k < 1) throw InputError("error_analysis: k must be >= 1");
    std::vector<SubtaskErrors> out;
    for (const auto& sub : report.subtasks) {
        SubtaskErrors errors;
        errors.subtask = sub.subtask;
        std::vector<size_t> idx(sub.pairs.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
            return sub.pairs[a].sq_rank_error > sub.pairs[b].sq_rank_error;
        });
        const size_t take = std::min<size_t>(static_cast<size_t>(k), idx.size());
        errors.truncated_to_n = static_cast<size_t>(k) > idx.size();
        for (size_t i = 0; i < take; ++i) {
            const PairResult& p = sub.pairs[idx[i]];
            ErrorEntry e;
            e.pair = p;
            e.direction = p.rank_est > p.rank_gold  ? "overestimated"
                          : p.rank_est < p.rank_gold ? "underestimated"
                                                     : "exact";
            errors.top.push_back(std::move(e));
        }
        out.push_back(std::move(errors));
    }
    return out;
}

namespace {

std::string plain_number(double x) {
    if (x == std::floor(x) && std::abs(x) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.0f", x);
        return buf;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

}  // namespace

void write_error_analysis_tsv(std::ostream& out, const std::vector<SubtaskErrors>& errors) {
    out << "subtask\tsentence1\tsentence2\tR_G\tR_E\terror\tdirection\n";
    for (const auto& sub : errors)
        for (const auto& e : sub.top)
            out << sub.subtask << "\t" << e.pair.sentence1 << "\t" << e.pair.sentence2 << "\t"
                << plain_number(e.pair.rank_gold) << "\t" << plain_number(e.pair.rank_est) << "\t"
                << plain_number(e.pair.sq_rank_error) << "\t" << e.direction << "\n";
}

namespace {

int bin_of(double cosine) {
    int b = static_cast<int>(std::floor((cosine + 1.0) / 0.01));
    return std::clamp(b, 0, SimilarityDistribution::kBins - 1);
}

double peak_of(const std::vector<int>& bins) {
    int best = 0;
    for (int i = 1; i < SimilarityDistribution::kBins; ++i)
        if (bins[i] > bins[best]) best = i;
    return -1.0 + (best + 0.5) * 0.01;
}

}  // namespace

SimilarityDistribution similarity_distribution(const enc::Model& model,
                                               const std::vector<data::SentencePair>& pairs,
                                               int sample_size, uint64_t seed) {
    if (sample_size < 1) throw InputError("similarity_distribution: sample size must be >= 1");
    if (pairs.size() < 2) throw InputError("similarity_distribution: need at least 2 sentences");
    if (static_cast<size_t>(sample_size) > pairs.size())
        throw InputError("similarity_distribution: sample size exceeds population");

    num::Rng rng(num::substream(seed, "sampling"));
    std::vector<size_t> chosen(pairs.size());
    std::iota(chosen.begin(), chosen.end(), 0);
    for (size_t i = chosen.size(); i > 1; --i)
        std::swap(chosen[i - 1], chosen[rng.below(i)]);
    chosen.resize(sample_size);

    std::vector<std::string> sentences, negations, others;
    for (size_t i : chosen) {
        sentences.push_back(pairs[i].original);
        negations.push_back(pairs[i].negation);
        size_t j = rng.below(pairs.size());
        while (j == i) j = rng.below(pairs.size());
        others.push_back(pairs[j].original);
    }

    auto h = model.embed(sentences, enc::TemplateVariant::Original);
    auto hn = model.embed(negations, enc::TemplateVariant::Original);
    auto ho = model.embed(others, enc::TemplateVariant::Original);

    SimilarityDistribution dist;
    dist.sample_size = sample_size;
    dist.positive.assign(SimilarityDistribution::kBins, 0);
    dist.negative.assign(SimilarityDistribution::kBins, 0);
    dist.soft_negative.assign(SimilarityDistribution::kBins, 0);
    for (int i = 0; i < sample_size; ++i) {
        dist.positive[bin_of(1.0)] += 1;  // a sentence with itself, by convention
        dist.soft_negative[bin_of(obj::cosine(h[i], hn[i]))] += 1;
        dist.negative[bin_of(obj::cosine(h[i], ho[i]))] += 1;
    }
    dist.peak_positive = peak_of(dist.positive);
    dist.peak_negative = peak_of(dist.negative);
    dist.peak_soft_negative = peak_of(dist.soft_negative);
    return dist;
}

void write_distribution_csv(std::ostream& out, const SimilarityDistribution& dist) {
    out << "bin_left,count_pos,count_neg,count_softneg\n";
    for (int i = 0; i < SimilarityDistribution::kBins; ++i)
        out << (-1.0 + i * 0.01) << "," << dist.positive[i] << "," << dist.negative[i] << ","
            << dist.soft_negative[i] << "\n";
}

TripletEval triplet_eval(const enc::Model& model, const std::vector<data::SentencePair>& pairs) {
    if (pairs.empty()) throw InputError("triplet_eval: no pairs");
    std::vector<std::string> originals, negations;
    for (const auto& p : pairs) {
        originals.push_back(p.original);
        negations.push_back(p.negation);
    }
    // Eq-style h: the margin acts on the training-path readout.
    auto h = model.embed(originals, enc::TemplateVariant::Original, /*keep_mlp=*/true);
    auto hp = model.embed(originals, enc::TemplateVariant::Positive, /*keep_mlp=*/true);
    auto hn = model.embed(negations, enc::TemplateVariant::SoftNegative, /*keep_mlp=*/true);

    TripletEval te;
    te.count = static_cast<int>(pairs.size());
    for (size_t i = 0; i < pairs.size(); ++i) {
        te.mean_cos_positive += obj::cosine(h[i], hp[i]);
        te.mean_cos_soft_negative += obj::cosine(h[i], hn[i]);
    }
    te.mean_cos_positive /= te.count;
    te.mean_cos_soft_negative /= te.count;
    te.mean_delta = te.mean_cos_soft_negative - te.mean_cos_positive;
    return te;
}

}  // namespace sncse::eval

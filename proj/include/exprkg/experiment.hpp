#pragma once
// Enrichment cross-validation: the target dataset is split into stratified
// folds; each test fold holds target samples only, while every training split
// is the remaining target folds plus (for all variants but the single-dataset
// baseline) every auxiliary sample.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "exprkg/errors.hpp"
#include "exprkg/expression.hpp"
#include "exprkg/model_eval.hpp"
#include "exprkg/pipeline.hpp"
#include "exprkg/text.hpp"

namespace exprkg {

enum class Variant { BaselineSingle, BaselineMergedZeros, KgBinning, KgLinks, KgWeightedAvg };

inline constexpr Variant kAllVariants[] = {Variant::BaselineSingle, Variant::BaselineMergedZeros, Variant::KgBinning,
                                           Variant::KgLinks, Variant::KgWeightedAvg};

inline std::string_view to_string(Variant v) noexcept {
    switch (v) {
    case Variant::BaselineSingle: return "baseline-single";
    case Variant::BaselineMergedZeros: return "baseline-merged-zeros";
    case Variant::KgBinning: return "kg-binning";
    case Variant::KgLinks: return "kg-links";
    case Variant::KgWeightedAvg: return "kg-weighted-avg";
    }
    return "?";
}

inline std::optional<Variant> parse_variant(std::string_view s) noexcept {
    for (auto v : kAllVariants)
        if (to_string(v) == s) return v;
    return std::nullopt;
}

inline bool is_kg_variant(Variant v) noexcept {
    return v == Variant::KgBinning || v == Variant::KgLinks || v == Variant::KgWeightedAvg;
}

struct ExperimentConfig {
    std::string target;
    std::vector<std::string> aux;
    Variant variant = Variant::BaselineSingle;
    bool include_domain = true;
    std::size_t folds = 5;
    std::uint64_t seed = 42;
    TreeParams tree;

    void validate() const {
        if (target.empty()) throw ConfigError("experiment needs a target dataset");
        if (std::find(aux.begin(), aux.end(), target) != aux.end())
            throw ConfigError("target dataset " + target + " is also listed as auxiliary");
        if (folds < 2) throw ConfigError("need at least 2 folds");
        tree.validate();
    }

    /// Report label: the variant name, suffixed for the no-domain-knowledge ablation.
    std::string label() const {
        std::string s(to_string(variant));
        if (is_kg_variant(variant) && !include_domain) s += "[no-domain]";
        return s;
    }
};

struct ExperimentInputs {
    std::vector<ExpressionDataset> datasets;
    DomainSources domain;
    IdMapping mapping;
    PipelineSettings pipeline;  // pipeline.kg.encoder is the graph used by kg-weighted-avg
};

struct SampleKey {
    std::string dataset;
    std::string sample;
    friend bool operator==(const SampleKey&, const SampleKey&) = default;
};

struct FoldResult {
    std::size_t fold = 0;
    Metrics metrics;
    std::vector<SampleKey> test;
    std::vector<SampleKey> train;
};

struct EvaluationReport {
    std::string label;
    std::string target;
    std::vector<FoldResult> folds;
    Metrics mean;
};

namespace detail {

inline const ExpressionDataset& find_dataset(std::span<const ExpressionDataset> all, std::string_view id) {
    for (const auto& ds : all)
        if (ds.id == id) return ds;
    throw ConfigError("unknown dataset id: " + std::string(id));
}

inline Metrics mean_metrics(std::span<const FoldResult> folds) {
    Metrics m;
    for (const auto& f : folds) {
        m.accuracy += f.metrics.accuracy;
        m.precision += f.metrics.precision;
        m.recall += f.metrics.recall;
        m.f1 += f.metrics.f1;
        m.waf += f.metrics.waf;
        m.auc += f.metrics.auc;
        m.degenerate = m.degenerate || f.metrics.degenerate;
    }
    const double k = static_cast<double>(folds.size());
    m.accuracy /= k;
    m.precision /= k;
    m.recall /= k;
    m.f1 /= k;
    m.waf /= k;
    m.auc /= k;
    return m;
}

} // namespace detail

/// Datasets of an experiment in KG order: target first, then auxiliaries as listed.
inline std::vector<ExpressionDataset> experiment_datasets(const ExperimentConfig& config, const ExperimentInputs& in) {
    std::vector<ExpressionDataset> out;
    out.push_back(detail::find_dataset(in.datasets, config.target));
    for (const auto& a : config.aux) out.push_back(detail::find_dataset(in.datasets, a));
    return out;
}

/// Patient vectors for a KG variant. The graph, walks and embeddings are built once from
/// every dataset of the experiment; folds only affect the classifier.
inline PatientMatrix kg_features(const ExperimentConfig& config, const ExperimentInputs& in) {
    if (!is_kg_variant(config.variant)) throw ConfigError(config.label() + " is not a KG variant");
    auto datasets = experiment_datasets(config, in);
    PipelineSettings settings = in.pipeline;
    settings.kg.include_domain = config.include_domain;
    Representation rep = Representation::Direct;
    if (config.variant == Variant::KgBinning) settings.kg.encoder = Encoder::Binning;
    else if (config.variant == Variant::KgLinks) settings.kg.encoder = Encoder::Links;
    else rep = Representation::WeightedAverage;
    return run_pipeline(datasets, in.domain, in.mapping, settings, rep).patients;
}

/// Runs the fold protocol. `kg_vectors` supplies precomputed patient vectors for KG
/// variants; when absent they are computed with kg_features().
inline EvaluationReport run_experiment(const ExperimentConfig& config, const ExperimentInputs& in,
                                       const PatientMatrix* kg_vectors = nullptr) {
    config.validate();
    const ExpressionDataset& target = detail::find_dataset(in.datasets, config.target);
    std::vector<ExpressionDataset> aux;
    for (const auto& a : config.aux) aux.push_back(detail::find_dataset(in.datasets, a));
    if (config.variant != Variant::BaselineSingle && aux.empty())
        throw ConfigError(config.label() + " needs at least one auxiliary dataset");

    // Feature rows for every sample that may be used: target rows first, then auxiliaries.
    struct Row {
        SampleKey key;
        Label label;
        std::vector<double> x;
    };
    std::vector<Row> target_rows, aux_rows;

    auto raw_row = [](const ExpressionDataset& ds, std::size_t i) {
        std::vector<double> x;
        for (const auto& v : ds.samples[i].values) x.push_back(v.value_or(0.0));
        return x;
    };

    std::optional<PatientMatrix> computed;
    const PatientMatrix* vectors = kg_vectors;
    if (is_kg_variant(config.variant) && !vectors) {
        computed = kg_features(config, in);
        vectors = &*computed;
    }
    auto kg_row = [&](const ExpressionDataset& ds, std::size_t i) {
        const auto* r = vectors->find(ds.id, ds.samples[i].id);
        if (!r) throw ConfigError("no patient vector for " + ds.id + "/" + ds.samples[i].id);
        return r->vector;
    };

    std::optional<MergedFeatures> merged;
    if (config.variant == Variant::BaselineMergedZeros) merged = merged_zero_features(target, aux);

    auto make_row = [&](const ExpressionDataset& ds, std::size_t i) {
        Row r{{ds.id, ds.samples[i].id}, ds.samples[i].label, {}};
        switch (config.variant) {
        case Variant::BaselineSingle: r.x = raw_row(ds, i); break;
        case Variant::BaselineMergedZeros: r.x = merged->row(ds, i); break;
        default: r.x = kg_row(ds, i);
        }
        return r;
    };
    for (std::size_t i = 0; i < target.samples.size(); ++i) target_rows.push_back(make_row(target, i));
    if (config.variant != Variant::BaselineSingle)
        for (const auto& ds : aux)
            for (std::size_t i = 0; i < ds.samples.size(); ++i) aux_rows.push_back(make_row(ds, i));

    std::vector<Label> target_labels;
    for (const auto& r : target_rows) target_labels.push_back(r.label);
    const auto folds = stratified_kfold(target_labels, config.folds, config.seed);

    EvaluationReport report;
    report.label = config.label();
    report.target = target.id;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        std::vector<bool> in_test(target_rows.size(), false);
        for (auto i : folds[f]) in_test[i] = true;

        FoldResult fr;
        fr.fold = f;
        FeatureMatrix X;
        std::vector<Label> y;
        for (std::size_t i = 0; i < target_rows.size(); ++i) {
            if (in_test[i]) continue;
            X.push_back(target_rows[i].x);
            y.push_back(target_rows[i].label);
            fr.train.push_back(target_rows[i].key);
        }
        for (const auto& r : aux_rows) {
            X.push_back(r.x);
            y.push_back(r.label);
            fr.train.push_back(r.key);
        }
        const DecisionTree tree = fit_tree(X, y, config.tree);

        std::vector<Label> y_test;
        std::vector<double> scores;
        for (auto i : folds[f]) {
            y_test.push_back(target_rows[i].label);
            scores.push_back(tree.predict_proba(target_rows[i].x));
            fr.test.push_back(target_rows[i].key);
        }
        fr.metrics = compute_metrics(y_test, scores);
        report.folds.push_back(std::move(fr));
    }
    report.mean = detail::mean_metrics(report.folds);
    return report;
}

inline constexpr std::string_view kCsvHeader = "variant,fold,acc,pr,re,f1,waf,auc";

inline void write_csv_rows(std::ostream& out, const EvaluationReport& r) {
    auto row = [&](const std::string& fold, const Metrics& m) {
        out << r.label << ',' << fold;
        for (double v : {m.accuracy, m.precision, m.recall, m.f1, m.waf, m.auc}) out << ',' << text::format_fixed(v, 6);
        out << '\n';
    };
    for (const auto& f : r.folds) row(std::to_string(f.fold), f.metrics);
    row("mean", r.mean);
}

inline void write_csv(std::ostream& out, std::span<const EvaluationReport> reports) {
    out << kCsvHeader << '\n';
    for (const auto& r : reports) write_csv_rows(out, r);
}

/// Human-readable report: one section per variant with per-fold rows, the mean, and
/// the train/test composition of each fold.
inline void write_text_report(std::ostream& out, std::span<const EvaluationReport> reports) {
    auto metrics_line = [&](std::string_view name, const Metrics& m) {
        out << "  " << name;
        for (std::size_t pad = name.size(); pad < 6; ++pad) out << ' ';
        for (double v : {m.accuracy, m.precision, m.recall, m.f1, m.waf, m.auc}) out << "  " << text::format_fixed(v, 3);
        if (m.degenerate) out << "  (degenerate)";
        out << '\n';
    };
    for (const auto& r : reports) {
        out << "[" << r.label << "]\n";
        out << "  target: " << r.target << '\n';
        out << "  fold    acc    pr     re     f1     waf    auc\n";
        for (const auto& f : r.folds) metrics_line(std::to_string(f.fold), f.metrics);
        metrics_line("mean", r.mean);
        for (const auto& f : r.folds) {
            std::size_t train_target = 0;
            for (const auto& k : f.train) train_target += k.dataset == r.target;
            out << "  fold " << f.fold << ": test=" << f.test.size() << " target samples, train=" << train_target
                << " target + " << (f.train.size() - train_target) << " auxiliary samples\n";
        }
        out << '\n';
    }
}

} // namespace exprkg

#pragma once
// Patient vectors from a trained embedding model, two ways:
//  - direct: the patient node's own embedding;
//  - weighted average: gene embeddings averaged with weights derived from the
//    patient's expression values.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "exprkg/embedder.hpp"
#include "exprkg/errors.hpp"
#include "exprkg/expression.hpp"
#include "exprkg/text.hpp"
#include "exprkg/vocabulary.hpp"

namespace exprkg {

struct PatientRow {
    std::string sample_id;
    std::string dataset_id;
    Label label = Label::Control;
    std::vector<double> vector;

    friend bool operator==(const PatientRow&, const PatientRow&) = default;
};

struct PatientMatrix {
    std::size_t dimension = 0;
    std::vector<PatientRow> rows;

    friend bool operator==(const PatientMatrix&, const PatientMatrix&) = default;

    const PatientRow* find(std::string_view dataset, std::string_view sample) const {
        for (const auto& r : rows)
            if (r.dataset_id == dataset && r.sample_id == sample) return &r;
        return nullptr;
    }
};

/// Floor added to every normalized weight so a patient's weights never all vanish.
inline constexpr double kWeightEpsilon = 1e-6;

/// Each patient's own embedding, rows in dataset order then sample order.
inline PatientMatrix direct_representation(const EmbeddingModel& model, std::span<const ExpressionDataset> datasets,
                                           const Namespace& ns = Namespace{}) {
    PatientMatrix m;
    m.dimension = model.dimension();
    for (const auto& ds : datasets) {
        for (const auto& s : ds.samples) {
            const auto token = ns.patient(ds.id, s.id).text;
            if (!model.contains(token))
                throw LookupError("no embedding for patient " + s.id + " of dataset " + ds.id +
                                  " (were patients included in the walk start set?)");
            auto e = model.embedding(token);
            m.rows.push_back({s.id, ds.id, s.label, std::vector<double>(e.begin(), e.end())});
        }
    }
    return m;
}

/// Min-max normalization of one gene column over its non-missing values.
/// A constant column normalizes to 0 everywhere.
inline std::vector<std::optional<double>> minmax_normalize(std::span<const std::optional<double>> column) {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& v : column)
        if (v) {
            lo = std::min(lo, *v);
            hi = std::max(hi, *v);
        }
    std::vector<std::optional<double>> out(column.size());
    for (std::size_t i = 0; i < column.size(); ++i)
        if (column[i]) out[i] = hi > lo ? (*column[i] - lo) / (hi - lo) : 0.0;
    return out;
}

/// sum_g w_g e_g / sum_g w_g.
inline std::vector<double> weighted_mean(std::span<const std::span<const float>> vectors, std::span<const double> weights) {
    if (vectors.empty() || vectors.size() != weights.size())
        throw ConfigError("weighted mean needs one weight per vector and at least one vector");
    const std::size_t d = vectors[0].size();
    std::vector<double> acc(d, 0.0);
    double total = 0.0;
    for (std::size_t k = 0; k < vectors.size(); ++k) {
        if (vectors[k].size() != d) throw ConfigError("weighted mean: dimension mismatch");
        for (std::size_t i = 0; i < d; ++i) acc[i] += weights[k] * static_cast<double>(vectors[k][i]);
        total += weights[k];
    }
    if (!(total > 0.0)) throw UndefinedError("weighted mean: weights sum to zero");
    for (auto& x : acc) x /= total;
    return acc;
}

/// Weighted average of gene embeddings with weights minmax(x_pg) + epsilon. Genes with a
/// missing value or without an embedding are skipped.
inline PatientMatrix weighted_average_representation(const EmbeddingModel& model, const ExpressionDataset& ds,
                                                     const Namespace& ns = Namespace{}) {
    PatientMatrix m;
    m.dimension = model.dimension();

    std::vector<std::span<const float>> gene_vectors(ds.genes.size());
    std::vector<bool> embedded(ds.genes.size(), false);
    std::vector<std::vector<std::optional<double>>> weights(ds.genes.size());
    bool any = false;
    for (std::size_t j = 0; j < ds.genes.size(); ++j) {
        const auto token = ns.gene(ds.genes[j]).text;
        if (!model.contains(token)) continue;
        gene_vectors[j] = model.embedding(token);
        embedded[j] = true;
        any = true;
        auto col = ds.column(j);
        weights[j] = minmax_normalize(col);
    }
    if (!any) throw LookupError("dataset " + ds.id + ": none of its genes has an embedding");

    std::vector<std::span<const float>> used;
    std::vector<double> w;
    for (std::size_t p = 0; p < ds.samples.size(); ++p) {
        used.clear();
        w.clear();
        for (std::size_t j = 0; j < ds.genes.size(); ++j) {
            if (!embedded[j] || !weights[j][p]) continue;
            used.push_back(gene_vectors[j]);
            w.push_back(*weights[j][p] + kWeightEpsilon);
        }
        const auto& s = ds.samples[p];
        if (used.empty())
            throw LookupError("patient " + s.id + " of dataset " + ds.id + " has no embedded gene with a value");
        m.rows.push_back({s.id, ds.id, s.label, weighted_mean(used, w)});
    }
    return m;
}

inline PatientMatrix weighted_average_representation(const EmbeddingModel& model,
                                                     std::span<const ExpressionDataset> datasets,
                                                     const Namespace& ns = Namespace{}) {
    PatientMatrix out;
    out.dimension = model.dimension();
    for (const auto& ds : datasets) {
        auto part = weighted_average_representation(model, ds, ns);
        for (auto& r : part.rows) out.rows.push_back(std::move(r));
    }
    return out;
}

/// TSV: sample_id, dataset_id, label, then one column per dimension.
inline void write_patient_tsv(std::ostream& out, const PatientMatrix& m) {
    out << "sample_id\tdataset_id\tlabel";
    for (std::size_t i = 0; i < m.dimension; ++i) out << "\tdim" << i;
    out << '\n';
    for (const auto& r : m.rows) {
        out << r.sample_id << '\t' << r.dataset_id << '\t' << to_string(r.label);
        for (double x : r.vector) out << '\t' << text::format_double(x, 17);
        out << '\n';
    }
}

} // namespace exprkg

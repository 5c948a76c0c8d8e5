#pragma once
// GEO-style processed expression tables: one row per sample, one column per gene.
//
// File layout (tab-separated):
//   sample_id  label  <gene-1> ... <gene-n>
//   S1         case   1.25    ...  NA

#include <algorithm>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "exprkg/errors.hpp"
#include "exprkg/text.hpp"

namespace exprkg {

enum class Label { Case, Control };

inline std::string_view to_string(Label l) noexcept { return l == Label::Case ? "case" : "control"; }

inline std::optional<Label> parse_label(std::string_view s) noexcept {
    if (s == "case") return Label::Case;
    if (s == "control") return Label::Control;
    return std::nullopt;
}

struct Sample {
    std::string id;
    Label label = Label::Control;
    std::vector<std::optional<double>> values;  // aligned with ExpressionDataset::genes

    friend bool operator==(const Sample&, const Sample&) = default;
};

struct ExpressionDataset {
    std::string id;
    std::vector<std::string> genes;
    std::vector<Sample> samples;

    friend bool operator==(const ExpressionDataset&, const ExpressionDataset&) = default;

    std::optional<std::size_t> gene_index(std::string_view gene) const {
        auto it = std::find(genes.begin(), genes.end(), gene);
        if (it == genes.end()) return std::nullopt;
        return static_cast<std::size_t>(it - genes.begin());
    }

    std::vector<std::optional<double>> column(std::size_t gene) const {
        std::vector<std::optional<double>> out;
        out.reserve(samples.size());
        for (const auto& s : samples) out.push_back(s.values.at(gene));
        return out;
    }

    /// Non-missing values of one gene column, in sample order.
    std::vector<double> present_values(std::size_t gene) const {
        std::vector<double> out;
        for (const auto& s : samples)
            if (const auto& v = s.values.at(gene)) out.push_back(*v);
        return out;
    }

    std::size_t count(Label l) const {
        return static_cast<std::size_t>(
            std::count_if(samples.begin(), samples.end(), [l](const Sample& s) { return s.label == l; }));
    }

    /// Throws ConfigError if any dataset invariant is broken.
    void validate() const {
        if (id.empty()) throw ConfigError("dataset id must be non-empty");
        std::unordered_set<std::string> seen;
        for (const auto& g : genes)
            if (!seen.insert(g).second) throw ConfigError("dataset " + id + ": duplicate gene id " + g);
        seen.clear();
        for (const auto& s : samples) {
            if (!seen.insert(s.id).second) throw ConfigError("dataset " + id + ": duplicate sample id " + s.id);
            if (s.values.size() != genes.size())
                throw ConfigError("dataset " + id + ": sample " + s.id + " has " + std::to_string(s.values.size()) +
                                  " values for " + std::to_string(genes.size()) + " genes");
        }
        if (count(Label::Case) == 0 || count(Label::Control) == 0)
            throw ConfigError("dataset " + id + " needs at least one case and one control sample");
    }
};

inline ExpressionDataset parse_expression_tsv(std::istream& in, std::string dataset_id) {
    ExpressionDataset ds;
    ds.id = std::move(dataset_id);
    if (ds.id.empty()) throw ConfigError("dataset id must be non-empty");

    std::string line;
    std::size_t n = 0;
    bool have_header = false;
    std::unordered_set<std::string> sample_ids;
    while (std::getline(in, line)) {
        ++n;
        auto body = text::strip_cr(line);
        if (text::trim(body).empty()) continue;
        auto cols = text::split(body, '\t');
        if (!have_header) {
            if (cols.size() < 3 || text::trim(cols[0]) != "sample_id" || text::trim(cols[1]) != "label")
                throw ParseError("header must be 'sample_id<TAB>label<TAB>gene...'", n);
            std::unordered_set<std::string> seen;
            for (std::size_t c = 2; c < cols.size(); ++c) {
                std::string g(text::trim(cols[c]));
                if (g.empty()) throw ParseError("empty gene id in column " + std::to_string(c + 1), n);
                if (!seen.insert(g).second) throw ParseError("duplicate gene id '" + g + "'", n);
                ds.genes.push_back(std::move(g));
            }
            have_header = true;
            continue;
        }
        if (cols.size() != ds.genes.size() + 2)
            throw ParseError("row has " + std::to_string(cols.size()) + " cells, header has " +
                                 std::to_string(ds.genes.size() + 2),
                             n);
        Sample s;
        s.id = std::string(text::trim(cols[0]));
        if (s.id.empty()) throw ParseError("empty sample id", n);
        if (!sample_ids.insert(s.id).second) throw ParseError("duplicate sample id '" + s.id + "'", n);
        auto label = parse_label(text::trim(cols[1]));
        if (!label) throw ParseError("unknown label '" + std::string(cols[1]) + "' (expected case/control)", n);
        s.label = *label;
        s.values.reserve(ds.genes.size());
        for (std::size_t c = 2; c < cols.size(); ++c) {
            auto cell = text::trim(cols[c]);
            if (cell == "NA") {
                s.values.emplace_back(std::nullopt);
                continue;
            }
            auto v = text::parse_double(cell);
            if (!v) throw ParseError("column " + std::to_string(c + 1) + ": non-numeric cell '" + std::string(cell) + "'", n);
            s.values.emplace_back(*v);
        }
        ds.samples.push_back(std::move(s));
    }
    if (!have_header) throw ParseError("empty expression table");
    try {
        ds.validate();
    } catch (const ConfigError& e) {
        throw ParseError(e.what());
    }
    return ds;
}

/// Inverse of parse_expression_tsv; values are written with round-trip precision.
inline void write_expression_tsv(std::ostream& out, const ExpressionDataset& ds, int digits = 17) {
    out << "sample_id\tlabel";
    for (const auto& g : ds.genes) out << '\t' << g;
    out << '\n';
    for (const auto& s : ds.samples) {
        out << s.id << '\t' << to_string(s.label);
        for (const auto& v : s.values) out << '\t' << (v ? text::format_double(*v, digits) : std::string("NA"));
        out << '\n';
    }
}

inline double gene_mean(const ExpressionDataset& ds, std::size_t gene) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& s : ds.samples) {
        if (const auto& v = s.values.at(gene)) {
            sum += *v;
            ++count;
        }
    }
    if (count == 0) throw UndefinedError("dataset " + ds.id + ": gene " + ds.genes.at(gene) + " has no values");
    return sum / static_cast<double>(count);
}

inline double gene_mean(const ExpressionDataset& ds, std::string_view gene) {
    auto idx = ds.gene_index(gene);
    if (!idx) throw LookupError("dataset " + ds.id + " has no gene " + std::string(gene));
    return gene_mean(ds, *idx);
}

inline std::set<std::string> shared_genes(const ExpressionDataset& a, const ExpressionDataset& b) {
    std::unordered_set<std::string> in_b(b.genes.begin(), b.genes.end());
    std::set<std::string> out;
    for (const auto& g : a.genes)
        if (in_b.count(g)) out.insert(g);
    return out;
}

} // namespace exprkg

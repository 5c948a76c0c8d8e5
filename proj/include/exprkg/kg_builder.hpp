#pragma once
// Knowledge-graph assembly from expression datasets and domain knowledge.
//
// Expression data enters the graph through one of two encoders:
//  - binning: patient -hasExpression-> _:x, _:x -isExpressionOfGene-> gene,
//             _:x -hasValue-> bin, with equal-width bins per (dataset, gene);
//  - links:   patient -overexpresses-> gene when the value is strictly above
//             the gene's mean within its dataset.
// Genes are bridged to proteins through the id mapping, which connects the
// expression half of the graph to GO annotations and protein interactions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "exprkg/domain_ingest.hpp"
#include "exprkg/errors.hpp"
#include "exprkg/expression.hpp"
#include "exprkg/rdf_store.hpp"
#include "exprkg/vocabulary.hpp"

namespace exprkg {

enum class Encoder { Binning, Links };

inline std::string_view to_string(Encoder e) noexcept { return e == Encoder::Binning ? "binning" : "links"; }

inline constexpr double kDefaultBinPercentage = 0.1;

struct KgBuildConfig {
    Encoder encoder = Encoder::Links;
    double bin_percentage = kDefaultBinPercentage;
    bool include_domain = true;
    std::string namespace_prefix = std::string(kDefaultNamespace);

    void validate() const {
        if (!(bin_percentage > 0.0 && bin_percentage <= 1.0))
            throw ConfigError("binning percentage must be in (0, 1], got " + std::to_string(bin_percentage));
        Namespace{namespace_prefix};
    }
};

struct BinSpec {
    std::vector<double> edges;  // n_bins + 1 entries

    std::size_t n_bins() const noexcept { return edges.empty() ? 0 : edges.size() - 1; }
};

/// Equal-width bins over [min, max]; the count is max(1, round(percentage * #distinct values)).
inline BinSpec make_bins(std::span<const double> values, double percentage) {
    if (values.empty()) throw UndefinedError("cannot bin an empty value list");
    if (!(percentage > 0.0 && percentage <= 1.0)) throw ConfigError("binning percentage must be in (0, 1]");
    auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (lo == hi) return {{lo, lo}};

    std::set<double> distinct(values.begin(), values.end());
    auto n = static_cast<std::size_t>(std::llround(percentage * static_cast<double>(distinct.size())));
    n = std::max<std::size_t>(1, n);

    BinSpec spec;
    spec.edges.reserve(n + 1);
    const double width = (hi - lo) / static_cast<double>(n);
    spec.edges.push_back(lo);
    for (std::size_t i = 1; i < n; ++i) spec.edges.push_back(lo + width * static_cast<double>(i));
    spec.edges.push_back(hi);
    return spec;
}

/// Index i with edges[i] <= value < edges[i+1]; the maximum falls in the last bin.
/// Values outside [edges.front(), edges.back()] are clamped.
inline std::size_t assign_bin(std::span<const double> edges, double value) {
    if (edges.size() < 2) throw ConfigError("bin edges need at least two entries");
    const std::size_t last = edges.size() - 2;
    auto it = std::upper_bound(edges.begin(), edges.end(), value);
    if (it == edges.begin()) return 0;
    auto idx = static_cast<std::size_t>(it - edges.begin()) - 1;
    return std::min(idx, last);
}

namespace detail {

inline std::size_t add_type_triples(Graph& g, const ExpressionDataset& ds, const Namespace& ns) {
    std::size_t added = 0;
    const Iri type = Namespace::rdf_type();
    for (const auto& s : ds.samples) added += g.insert(ns.patient(ds.id, s.id), type, ns.patient_class());
    for (const auto& gene : ds.genes) added += g.insert(ns.gene(gene), type, ns.gene_class());
    return added;
}

} // namespace detail

/// Binning encoder. Returns the number of triples newly inserted.
inline std::size_t encode_binning(Graph& g, const ExpressionDataset& ds, double percentage,
                                  const Namespace& ns = Namespace{}) {
    std::size_t added = detail::add_type_triples(g, ds, ns);
    std::vector<BinSpec> bins(ds.genes.size());
    for (std::size_t j = 0; j < ds.genes.size(); ++j) {
        auto values = ds.present_values(j);
        if (!values.empty()) bins[j] = make_bins(values, percentage);
    }
    const Iri has_expression = ns.has_expression();
    const Iri of_gene = ns.is_expression_of_gene();
    const Iri has_value = ns.has_value();
    for (const auto& s : ds.samples) {
        const Term patient{ns.patient(ds.id, s.id)};
        for (std::size_t j = 0; j < ds.genes.size(); ++j) {
            if (!s.values[j]) continue;
            const Term x{g.fresh_blank()};
            const std::size_t b = assign_bin(bins[j].edges, *s.values[j]);
            added += g.insert(patient, has_expression, x);
            added += g.insert(x, of_gene, ns.gene(ds.genes[j]));
            added += g.insert(x, has_value, ns.bin(ds.id, ds.genes[j], b));
        }
    }
    return added;
}

/// Links encoder: patient -overexpresses-> gene iff value > mean (strict).
inline std::size_t encode_links(Graph& g, const ExpressionDataset& ds, const Namespace& ns = Namespace{}) {
    std::size_t added = detail::add_type_triples(g, ds, ns);
    std::vector<std::optional<double>> means(ds.genes.size());
    for (std::size_t j = 0; j < ds.genes.size(); ++j)
        if (!ds.present_values(j).empty()) means[j] = gene_mean(ds, j);
    const Iri over = ns.overexpresses();
    for (const auto& s : ds.samples) {
        const Term patient{ns.patient(ds.id, s.id)};
        for (std::size_t j = 0; j < ds.genes.size(); ++j)
            if (s.values[j] && *s.values[j] > *means[j]) added += g.insert(patient, over, ns.gene(ds.genes[j]));
    }
    return added;
}

struct BridgeResult {
    std::size_t added = 0;
    std::size_t unmapped_genes = 0;
};

/// Links every gene node already in the graph to its mapped proteins.
inline BridgeResult bridge_genes(Graph& g, const IdMapping& mapping, const Namespace& ns = Namespace{}) {
    BridgeResult r;
    const auto gene_prefix = ns.gene("").text;
    // Collect first so the graph is not modified while scanning it.
    std::vector<Term> genes = g.subjects_with(Namespace::rdf_type(), Term{ns.gene_class()});
    const Iri mapped_to = ns.mapped_to();
    for (const auto& gene : genes) {
        const auto& iri = std::get<Iri>(gene).text;
        // Gene IRIs are the prefix plus the encoded id; the mapping is keyed by raw id.
        std::string raw = text::unescape_token(std::string_view(iri).substr(gene_prefix.size()));
        const auto* proteins = mapping.find(raw);
        if (!proteins) {
            ++r.unmapped_genes;
            continue;
        }
        for (const auto& p : *proteins) r.added += g.insert(gene, mapped_to, ns.protein(p));
    }
    return r;
}

struct BuildReport {
    Encoder encoder = Encoder::Links;
    bool include_domain = true;
    std::vector<std::pair<std::string, std::size_t>> expression_triples;  // per dataset
    std::size_t domain_triples = 0;
    std::size_t bridge_triples = 0;
    std::size_t unmapped_genes = 0;
    std::size_t obsolete_terms = 0;
    std::size_t dropped_parents = 0;
    std::size_t negated_annotations = 0;
    std::size_t interactions_below_threshold = 0;
    GraphStats stats;

    std::size_t expression_total() const {
        std::size_t n = 0;
        for (const auto& [_, c] : expression_triples) n += c;
        return n;
    }
};

inline std::string render_report(const BuildReport& r) {
    std::string out;
    auto line = [&](std::string_view key, const std::string& value) {
        out += key;
        out += ": ";
        out += value;
        out += '\n';
    };
    line("encoder", std::string(to_string(r.encoder)));
    line("domain_knowledge", r.include_domain ? "on" : "off");
    for (const auto& [ds, n] : r.expression_triples) line("expression_triples[" + ds + "]", std::to_string(n));
    line("expression_triples_total", std::to_string(r.expression_total()));
    line("domain_triples", std::to_string(r.domain_triples));
    line("bridge_triples", std::to_string(r.bridge_triples));
    line("unmapped_genes", std::to_string(r.unmapped_genes));
    line("obsolete_terms_skipped", std::to_string(r.obsolete_terms));
    line("unresolved_parents_dropped", std::to_string(r.dropped_parents));
    line("negated_annotations_skipped", std::to_string(r.negated_annotations));
    line("interactions_below_threshold", std::to_string(r.interactions_below_threshold));
    line("total_triples", std::to_string(r.stats.triples));
    line("relation_types", std::to_string(r.stats.predicates));
    line("nodes", std::to_string(r.stats.nodes));
    return out;
}

struct KnowledgeGraph {
    Graph graph;
    BuildReport report;
};

/// Builds the full graph: expression triples for every dataset, then (optionally)
/// domain triples and gene->protein bridge triples.
inline KnowledgeGraph assemble_kg(std::span<const ExpressionDataset> datasets, const DomainSources& domain,
                                  const IdMapping& mapping, const KgBuildConfig& config) {
    config.validate();
    if (datasets.empty()) throw ConfigError("at least one expression dataset is required");
    const Namespace ns{config.namespace_prefix};
    KnowledgeGraph kg;
    kg.report.encoder = config.encoder;
    kg.report.include_domain = config.include_domain;
    for (const auto& ds : datasets) {
        ds.validate();
        std::size_t n = config.encoder == Encoder::Binning ? encode_binning(kg.graph, ds, config.bin_percentage, ns)
                                                           : encode_links(kg.graph, ds, ns);
        kg.report.expression_triples.emplace_back(ds.id, n);
    }
    if (config.include_domain) {
        for (const auto& t : domain_triples(domain, ns)) kg.report.domain_triples += kg.graph.insert(t);
        auto bridge = bridge_genes(kg.graph, mapping, ns);
        kg.report.bridge_triples = bridge.added;
        kg.report.unmapped_genes = bridge.unmapped_genes;
        kg.report.obsolete_terms = domain.ontology.obsolete_skipped;
        kg.report.dropped_parents = domain.ontology.dropped_parents;
        kg.report.negated_annotations = domain.annotations.negated_skipped;
        kg.report.interactions_below_threshold = domain.interactions.below_threshold;
    }
    kg.report.stats = kg.graph.stats();
    return kg;
}

} // namespace exprkg

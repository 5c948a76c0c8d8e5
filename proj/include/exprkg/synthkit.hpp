#pragma once
// Deterministic synthetic multi-study inputs.
//
// One target and one or two auxiliary expression datasets. The target panel can
// be disjoint from the auxiliary panels while the auxiliary panels overlap each
// other. Case samples get a mean shift on each dataset's signal genes, and all
// signal genes (across datasets) share dedicated GO annotations and a dense PPI
// neighbourhood, so domain knowledge links signal genes the panels do not share.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "exprkg/domain_ingest.hpp"
#include "exprkg/errors.hpp"
#include "exprkg/expression.hpp"
#include "exprkg/walker.hpp"

namespace exprkg {

struct SynthConfig {
    std::uint64_t seed = 42;
    std::size_t target_samples = 60;
    std::size_t aux_samples = 40;  // per auxiliary dataset
    std::size_t aux_datasets = 2;  // 1 or 2
    double case_fraction = 0.5;
    std::size_t target_panel = 60;
    std::size_t aux_panel = 80;
    double target_aux_overlap = 0.0;  // fraction of an auxiliary panel taken from the target panel
    double aux_overlap = 0.45;        // fraction of the second auxiliary panel taken from the first
    std::size_t signal_genes = 10;    // per dataset
    double effect_size = 2.0;         // case mean shift of signal genes, in noise sd units
    double missing_rate = 0.0;
    std::size_t go_terms = 80;
    std::size_t signal_terms = 2;
    double annotation_density = 2.0;  // mean random annotations per protein
    double interaction_density = 1.0; // mean random PPI edges per protein
    std::size_t signal_interactions = 2;  // PPI edges from each signal protein to other signal proteins

    void validate() const {
        auto fraction = [](double v, const char* name) {
            if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string(name) + " must be in [0,1]");
        };
        fraction(target_aux_overlap, "target/auxiliary overlap");
        fraction(aux_overlap, "auxiliary overlap");
        fraction(missing_rate, "missing rate");
        if (!(case_fraction > 0.0 && case_fraction < 1.0)) throw ConfigError("case fraction must be in (0,1)");
        if (effect_size < 0.0) throw ConfigError("effect size must be >= 0");
        if (aux_datasets < 1 || aux_datasets > 2) throw ConfigError("1 or 2 auxiliary datasets are supported");
        if (target_samples < 2 || aux_samples < 2) throw ConfigError("each dataset needs at least 2 samples");
        if (signal_genes == 0) throw ConfigError("need at least one signal gene");
        if (signal_genes > target_panel || signal_genes > aux_panel)
            throw ConfigError("signal genes exceed a panel size");
        if (shared_with_target() > target_panel)
            throw ConfigError("target/auxiliary overlap needs more genes than the target panel has");
        if (aux_datasets == 2 && shared_between_aux() > aux_panel)
            throw ConfigError("auxiliary overlap exceeds the auxiliary panel");
        if (go_terms < signal_terms + 3) throw ConfigError("ontology needs 3 roots plus the signal terms");
        auto cases = [&](std::size_t n) { return static_cast<std::size_t>(std::llround(case_fraction * n)); };
        for (std::size_t n : {target_samples, aux_samples})
            if (cases(n) == 0 || cases(n) == n) throw ConfigError("every dataset needs both classes");
    }

    std::size_t shared_with_target() const {
        return static_cast<std::size_t>(std::llround(target_aux_overlap * static_cast<double>(aux_panel)));
    }
    std::size_t shared_between_aux() const {
        return static_cast<std::size_t>(std::llround(aux_overlap * static_cast<double>(aux_panel)));
    }
};

struct SynthSuite {
    std::vector<ExpressionDataset> datasets;  // target first
    std::vector<std::string> expression_tsv;  // file text per dataset
    std::vector<std::vector<std::string>> signal_genes;  // per dataset
    std::string obo;
    std::string gaf;
    std::string string_links;
    std::string mapping;
};

inline std::string synth_gene(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "G%05zu", i);
    return buf;
}

inline std::string synth_protein(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "P%05zu", i);
    return buf;
}

inline std::string synth_go(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "GO:%07zu", i + 1);
    return buf;
}

inline SynthSuite generate_suite(const SynthConfig& c) {
    c.validate();
    SynthSuite suite;

    // Panels, as indices into a global gene pool.
    std::vector<std::vector<std::size_t>> panels;
    std::size_t next_gene = 0;
    auto fresh = [&](std::size_t n, std::vector<std::size_t>& out) {
        for (std::size_t i = 0; i < n; ++i) out.push_back(next_gene++);
    };
    panels.emplace_back();
    fresh(c.target_panel, panels[0]);
    panels.emplace_back();
    const std::size_t from_target = c.shared_with_target();
    panels[1].assign(panels[0].begin(), panels[0].begin() + static_cast<std::ptrdiff_t>(from_target));
    fresh(c.aux_panel - from_target, panels[1]);
    if (c.aux_datasets == 2) {
        panels.emplace_back();
        const std::size_t from_aux = c.shared_between_aux();
        panels[2].assign(panels[1].begin(), panels[1].begin() + static_cast<std::ptrdiff_t>(from_aux));
        fresh(c.aux_panel - from_aux, panels[2]);
    }
    const std::size_t n_genes = next_gene;

    std::set<std::size_t> signal_pool;
    for (const auto& p : panels) {
        std::vector<std::string> sig;
        for (std::size_t i = 0; i < c.signal_genes; ++i) {
            signal_pool.insert(p[i]);
            sig.push_back(synth_gene(p[i]));
        }
        suite.signal_genes.push_back(std::move(sig));
    }

    // Expression tables.
    const char* ids[] = {"SYN_T", "SYN_A1", "SYN_A2"};
    for (std::size_t d = 0; d < panels.size(); ++d) {
        std::mt19937_64 rng(mix_seed(c.seed, 100 + d));
        std::normal_distribution<double> noise(0.0, 1.0);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const std::size_t n = d == 0 ? c.target_samples : c.aux_samples;
        const auto n_case = static_cast<std::size_t>(std::llround(c.case_fraction * static_cast<double>(n)));
        std::ostringstream tsv;
        tsv << "sample_id\tlabel";
        for (auto g : panels[d]) tsv << '\t' << synth_gene(g);
        tsv << '\n';
        for (std::size_t s = 0; s < n; ++s) {
            const bool is_case = s < n_case;
            char sid[32];
            std::snprintf(sid, sizeof sid, "%s_S%03zu", ids[d], s + 1);
            tsv << sid << '\t' << (is_case ? "case" : "control");
            for (std::size_t j = 0; j < panels[d].size(); ++j) {
                double v = noise(rng);
                if (is_case && j < c.signal_genes) v += c.effect_size;
                const bool missing = c.missing_rate > 0.0 && unit(rng) < c.missing_rate;
                tsv << '\t' << (missing ? std::string("NA") : text::format_fixed(v, 4));
            }
            tsv << '\n';
        }
        suite.expression_tsv.push_back(tsv.str());
        std::istringstream in(suite.expression_tsv.back());
        suite.datasets.push_back(parse_expression_tsv(in, ids[d]));
    }

    // Ontology: three roots, every other term is_a an earlier term; some part_of links.
    // The last `signal_terms` terms are reserved for signal proteins.
    {
        std::mt19937_64 rng(mix_seed(c.seed, 200));
        std::ostringstream obo;
        obo << "format-version: 1.2\nontology: go\n\n";
        const char* roots[] = {"biological_process", "molecular_function", "cellular_component"};
        for (std::size_t t = 0; t < c.go_terms; ++t) {
            obo << "[Term]\nid: " << synth_go(t) << '\n';
            if (t < 3) {
                obo << "name: " << roots[t] << "\n\n";
                continue;
            }
            obo << "name: synthetic term " << t << '\n';
            std::uniform_int_distribution<std::size_t> parent(0, t - 1);
            obo << "is_a: " << synth_go(parent(rng)) << '\n';
            if (t > 3 && std::uniform_real_distribution<double>(0, 1)(rng) < 0.1)
                obo << "relationship: part_of " << synth_go(parent(rng)) << '\n';
            obo << '\n';
        }
        suite.obo = obo.str();
    }

    // Annotations and interactions.
    {
        std::mt19937_64 rng(mix_seed(c.seed, 300));
        const std::size_t ordinary_terms = c.go_terms - c.signal_terms;
        std::uniform_int_distribution<std::size_t> term(3, ordinary_terms - 1);
        std::poisson_distribution<int> n_ann(c.annotation_density);
        std::ostringstream gaf;
        gaf << "!gaf-version: 2.2\n";
        auto annotate = [&](std::size_t gene, std::size_t go) {
            gaf << "UniProtKB\t" << synth_protein(gene) << '\t' << synth_protein(gene) << "\tenables\t" << synth_go(go)
                << "\tPMID:0\tIEA\t\tF\t\t\tprotein\ttaxon:9606\t20240101\tsynthkit\n";
        };
        for (std::size_t g = 0; g < n_genes; ++g) {
            const int k = std::max(1, n_ann(rng));
            std::set<std::size_t> chosen;
            for (int i = 0; i < k; ++i) chosen.insert(term(rng));
            for (auto t : chosen) annotate(g, t);
            if (signal_pool.count(g))
                for (std::size_t s = 0; s < c.signal_terms; ++s) annotate(g, ordinary_terms + s);
        }
        suite.gaf = gaf.str();

        std::ostringstream links;
        links << "protein1 protein2 combined_score\n";
        std::uniform_int_distribution<std::size_t> any_gene(0, n_genes - 1);
        std::uniform_int_distribution<int> score(150, 999);
        const auto n_random = static_cast<std::size_t>(std::llround(c.interaction_density * static_cast<double>(n_genes) / 2.0));
        for (std::size_t e = 0; e < n_random; ++e) {
            std::size_t a = any_gene(rng), b = any_gene(rng);
            if (a == b) continue;
            links << synth_protein(a) << ' ' << synth_protein(b) << ' ' << score(rng) << '\n';
        }
        std::vector<std::size_t> signal(signal_pool.begin(), signal_pool.end());
        if (signal.size() > 1) {
            std::uniform_int_distribution<std::size_t> pick(0, signal.size() - 1);
            std::uniform_int_distribution<int> high(900, 999);
            for (auto a : signal)
                for (std::size_t e = 0; e < c.signal_interactions; ++e) {
                    std::size_t b = signal[pick(rng)];
                    if (b == a) continue;
                    links << synth_protein(a) << ' ' << synth_protein(b) << ' ' << high(rng) << '\n';
                }
        }
        suite.string_links = links.str();
    }

    std::ostringstream mapping;
    for (std::size_t g = 0; g < n_genes; ++g) mapping << synth_gene(g) << '\t' << synth_protein(g) << '\n';
    suite.mapping = mapping.str();
    return suite;
}

/// Parses the suite's domain files the same way files on disk would be read.
inline DomainSources parse_domain(const SynthSuite& s, int min_score = kDefaultMinStringScore) {
    DomainSources d;
    std::istringstream obo(s.obo), gaf(s.gaf), links(s.string_links);
    d.ontology = parse_obo(obo);
    d.annotations = parse_gaf(gaf);
    d.interactions = parse_string_links(links, min_score);
    return d;
}

inline IdMapping parse_mapping(const SynthSuite& s) {
    std::istringstream in(s.mapping);
    return parse_id_mapping(in);
}

} // namespace exprkg

#pragma once
// Parsers for the domain-knowledge sources (GO ontology in OBO, GO annotations
// in GAF, STRING links, gene->protein id mapping) and their triple emission.

#include <cstddef>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "exprkg/errors.hpp"
#include "exprkg/rdf_store.hpp"
#include "exprkg/text.hpp"
#include "exprkg/vocabulary.hpp"

namespace exprkg {

struct OntologyTerm {
    std::string id;
    std::string name;
    std::vector<std::string> parents;
    std::vector<std::pair<std::string, std::string>> relations;  // (relation-name, target id)
};

struct OntologySource {
    std::vector<OntologyTerm> terms;
    std::size_t obsolete_skipped = 0;
    std::size_t dropped_parents = 0;  // is_a targets that do not resolve to a kept term
};

struct AnnotationRecord {
    std::string protein;
    std::string go_id;
    std::string qualifier;
};

struct AnnotationSource {
    std::vector<AnnotationRecord> records;
    std::size_t negated_skipped = 0;
};

struct InteractionRecord {
    std::string protein_a;
    std::string protein_b;
    int score = 0;
};

struct InteractionSource {
    std::vector<InteractionRecord> records;
    std::size_t below_threshold = 0;
    std::size_t self_loops_skipped = 0;
};

/// Gene id -> protein ids. Case-sensitive; never holds an empty list.
class IdMapping {
public:
    void add(std::string gene, std::string protein) {
        auto [it, inserted] = map_.try_emplace(gene);
        if (inserted) order_.push_back(std::move(gene));
        auto& list = it->second;
        for (const auto& p : list)
            if (p == protein) return;
        list.push_back(std::move(protein));
    }

    /// Mapped proteins, or nullptr when the gene is unmapped.
    const std::vector<std::string>* find(std::string_view gene) const {
        auto it = map_.find(std::string(gene));
        return it == map_.end() ? nullptr : &it->second;
    }

    std::size_t size() const noexcept { return map_.size(); }
    bool empty() const noexcept { return map_.empty(); }
    const std::vector<std::string>& genes() const noexcept { return order_; }

private:
    std::unordered_map<std::string, std::vector<std::string>> map_;
    std::vector<std::string> order_;
};

/// Everything the domain-knowledge half of the KG is built from.
struct DomainSources {
    OntologySource ontology;
    AnnotationSource annotations;
    InteractionSource interactions;
};

inline constexpr int kDefaultMinStringScore = 700;

/// Reads `[Term]` stanzas of an OBO flat file. Other stanza types are ignored.
inline OntologySource parse_obo(std::istream& in) {
    OntologySource out;
    struct Pending {
        OntologyTerm term;
        bool obsolete = false;
        bool has_id = false;
        std::size_t start_line = 0;
    };
    std::vector<OntologyTerm> kept;
    Pending cur;
    bool in_term = false;

    auto flush = [&] {
        if (!in_term) return;
        if (!cur.has_id) throw ParseError("[Term] stanza without id:", cur.start_line);
        if (cur.obsolete) ++out.obsolete_skipped;
        else kept.push_back(std::move(cur.term));
        cur = Pending{};
        in_term = false;
    };

    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        auto body = text::trim(line);
        if (body.empty() || body.front() == '!') continue;
        if (body.front() == '[') {
            flush();
            if (body == "[Term]") {
                in_term = true;
                cur.start_line = n;
            }
            continue;
        }
        if (!in_term) continue;

        auto colon = body.find(':');
        if (colon == std::string_view::npos) continue;
        auto tag = text::trim(body.substr(0, colon));
        auto value = text::trim(body.substr(colon + 1));
        // Trailing modifiers `{...}` and comments `! ...` are not part of the value.
        if (auto bang = value.find(" !"); bang != std::string_view::npos) value = text::trim(value.substr(0, bang));
        if (auto brace = value.find(" {"); brace != std::string_view::npos) value = text::trim(value.substr(0, brace));

        if (tag == "id") {
            if (value.empty()) throw ParseError("empty id:", n);
            cur.term.id = std::string(value);
            cur.has_id = true;
        } else if (tag == "name") {
            cur.term.name = std::string(value);
        } else if (tag == "is_a") {
            auto fields = text::split_ws(value);
            if (fields.empty()) throw ParseError("empty is_a:", n);
            cur.term.parents.emplace_back(fields[0]);
        } else if (tag == "relationship") {
            auto fields = text::split_ws(value);
            if (fields.size() < 2) throw ParseError("relationship: needs a relation name and a target id", n);
            cur.term.relations.emplace_back(std::string(fields[0]), std::string(fields[1]));
        } else if (tag == "is_obsolete") {
            cur.obsolete = (value == "true");
        }
    }
    flush();

    std::unordered_set<std::string> ids;
    for (const auto& t : kept)
        if (!ids.insert(t.id).second) throw ParseError("duplicate term id " + t.id);
    for (auto& t : kept) {
        std::vector<std::string> resolved;
        for (auto& p : t.parents) {
            if (ids.count(p)) resolved.push_back(std::move(p));
            else ++out.dropped_parents;
        }
        t.parents = std::move(resolved);
    }
    out.terms = std::move(kept);
    return out;
}

/// GAF 2.x: protein id in column 2, qualifier in column 4, GO id in column 5.
inline AnnotationSource parse_gaf(std::istream& in) {
    AnnotationSource out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        auto body = text::strip_cr(line);
        if (text::trim(body).empty() || body.front() == '!') continue;
        auto cols = text::split(body, '\t');
        if (cols.size() < 5)
            throw ParseError("GAF row has " + std::to_string(cols.size()) + " columns, need at least 5", n);
        auto protein = text::trim(cols[1]);
        auto qualifier = text::trim(cols[3]);
        auto go = text::trim(cols[4]);
        if (protein.empty() || go.empty()) throw ParseError("GAF row with empty protein or GO id", n);
        if (qualifier.find("NOT") != std::string_view::npos) {
            ++out.negated_skipped;
            continue;
        }
        out.records.push_back({std::string(protein), std::string(go), std::string(qualifier)});
    }
    return out;
}

/// STRING `protein1 protein2 combined_score` rows, keeping score >= min_score.
inline InteractionSource parse_string_links(std::istream& in, int min_score = kDefaultMinStringScore) {
    InteractionSource out;
    std::string line;
    std::size_t n = 0;
    bool first_data_line = true;
    while (std::getline(in, line)) {
        ++n;
        auto fields = text::split_ws(line);
        if (fields.empty()) continue;
        if (fields.size() < 3) throw ParseError("STRING row needs 3 fields", n);
        auto score = text::parse_int(fields[2]);
        if (!score) {
            if (first_data_line && !text::parse_double(fields[2])) {
                first_data_line = false;
                continue;  // header
            }
            throw ParseError("non-integer score '" + std::string(fields[2]) + "'", n);
        }
        first_data_line = false;
        if (*score < 0 || *score > 1000) throw ParseError("score out of [0,1000]", n);
        if (fields[0] == fields[1]) {
            ++out.self_loops_skipped;
            continue;
        }
        if (*score < min_score) {
            ++out.below_threshold;
            continue;
        }
        out.records.push_back({std::string(fields[0]), std::string(fields[1]), static_cast<int>(*score)});
    }
    return out;
}

/// Two tab-separated columns `gene protein`; a gene may appear on several rows.
inline IdMapping parse_id_mapping(std::istream& in) {
    IdMapping out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        auto body = text::strip_cr(line);
        if (text::trim(body).empty() || body.front() == '#') continue;
        auto cols = text::split(body, '\t');
        if (cols.size() != 2 || text::trim(cols[0]).empty() || text::trim(cols[1]).empty())
            throw ParseError("mapping row must have exactly 2 non-empty tab-separated columns", n);
        out.add(std::string(text::trim(cols[0])), std::string(text::trim(cols[1])));
    }
    return out;
}

/// Triples for the domain sources. Duplicates (e.g. repeated Protein type triples) are
/// left in; the graph deduplicates on insert.
inline std::vector<Triple> domain_triples(const OntologySource& ontology, const AnnotationSource& annotations,
                                          const InteractionSource& interactions, const Namespace& ns) {
    std::vector<Triple> out;
    const Iri type = Namespace::rdf_type();
    const Term go_class{ns.go_class()};
    const Term protein_class{ns.protein_class()};

    for (const auto& t : ontology.terms) {
        Term subject{Namespace::ontology_term(t.id)};
        out.push_back({subject, type, go_class});
        for (const auto& p : t.parents) out.push_back({subject, Namespace::subclass_of(), Namespace::ontology_term(p)});
        for (const auto& [rel, target] : t.relations)
            out.push_back({subject, ns.relation(rel), Namespace::ontology_term(target)});
    }
    for (const auto& a : annotations.records) {
        Term protein{ns.protein(a.protein)};
        out.push_back({protein, ns.has_function(), Namespace::ontology_term(a.go_id)});
        out.push_back({protein, type, protein_class});
    }
    for (const auto& r : interactions.records) {
        Term a{ns.protein(r.protein_a)};
        Term b{ns.protein(r.protein_b)};
        out.push_back({a, ns.interacts_with(), b});
        out.push_back({b, ns.interacts_with(), a});
        out.push_back({a, type, protein_class});
        out.push_back({b, type, protein_class});
    }
    return out;
}

inline std::vector<Triple> domain_triples(const DomainSources& d, const Namespace& ns) {
    return domain_triples(d.ontology, d.annotations, d.interactions, ns);
}

} // namespace exprkg

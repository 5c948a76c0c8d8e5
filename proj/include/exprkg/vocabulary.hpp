#pragma once
// IRIs used by the knowledge graph. Every IRI the builders emit comes from here.

#include <cstddef>
#include <string>
#include <string_view>

#include "exprkg/rdf_store.hpp"

namespace exprkg {

inline constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kRdfsSubClassOf = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
inline constexpr std::string_view kOboPrefix = "http://purl.obolibrary.org/obo/";
inline constexpr std::string_view kDefaultNamespace = "http://exprkg.org/kg/";

/// Percent-encodes characters that may not appear inside `<...>` or a walk token.
inline std::string iri_component(std::string_view s) {
    static constexpr char hex[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        auto u = static_cast<unsigned char>(c);
        if (u <= 0x20 || c == '<' || c == '>' || c == '"' || c == '{' || c == '}' || c == '|' || c == '\\' ||
            c == '^' || c == '`' || c == '%' || c == '/' || u == 0x7F) {
            out += '%';
            out += hex[u >> 4];
            out += hex[u & 0xF];
        } else {
            out += c;
        }
    }
    return out;
}

class Namespace {
public:
    explicit Namespace(std::string prefix = std::string(kDefaultNamespace)) : prefix_(std::move(prefix)) {
        if (prefix_.empty()) throw ConfigError("namespace prefix must be non-empty");
        for (char c : prefix_)
            if (text::is_space(c) || c == '<' || c == '>' || c == '"')
                throw ConfigError("namespace prefix contains a character not allowed in an IRI: " + prefix_);
    }

    const std::string& prefix() const noexcept { return prefix_; }

    // Classes
    Iri patient_class() const { return local("Patient"); }
    Iri gene_class() const { return local("Gene"); }
    Iri protein_class() const { return local("Protein"); }
    Iri go_class() const { return local("GOClass"); }

    // Predicates
    static Iri rdf_type() { return Iri{std::string(kRdfType)}; }
    static Iri subclass_of() { return Iri{std::string(kRdfsSubClassOf)}; }
    Iri has_expression() const { return local("hasExpression"); }
    Iri is_expression_of_gene() const { return local("isExpressionOfGene"); }
    Iri has_value() const { return local("hasValue"); }
    Iri overexpresses() const { return local("overexpresses"); }
    Iri mapped_to() const { return local("mappedTo"); }
    Iri has_function() const { return local("hasFunction"); }
    Iri interacts_with() const { return local("interactsWith"); }
    Iri relation(std::string_view name) const { return local("relation/" + iri_component(name)); }

    // Instances
    Iri patient(std::string_view dataset, std::string_view sample) const {
        return local("patient/" + iri_component(dataset) + "/" + iri_component(sample));
    }
    Iri gene(std::string_view gene_id) const { return local("gene/" + iri_component(gene_id)); }
    Iri protein(std::string_view protein_id) const { return local("protein/" + iri_component(protein_id)); }
    Iri bin(std::string_view dataset, std::string_view gene_id, std::size_t index) const {
        return local("bin/" + iri_component(dataset) + "/" + iri_component(gene_id) + "/" + std::to_string(index));
    }

    /// OBO-style ids (`GO:0008150`) map to their PURL; anything else lands under the local prefix.
    static Iri ontology_term(std::string_view id) {
        auto colon = id.find(':');
        if (colon != std::string_view::npos && colon > 0 && colon + 1 < id.size())
            return Iri{std::string(kOboPrefix) + iri_component(id.substr(0, colon)) + "_" +
                       iri_component(id.substr(colon + 1))};
        return Iri{std::string(kOboPrefix) + iri_component(id)};
    }

private:
    Iri local(std::string_view suffix) const { return Iri{prefix_ + std::string(suffix)}; }

    std::string prefix_;
};

} // namespace exprkg

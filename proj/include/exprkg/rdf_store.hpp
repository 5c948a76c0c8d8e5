#pragma once
// In-memory directed labeled multigraph over RDF terms.
//
// Terms are interned to dense 32-bit ids. Triples are kept in insertion order
// with a hash set for deduplication and a per-subject adjacency list, so
// outgoing() is deterministic and seeded walks are reproducible.

#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "exprkg/errors.hpp"
#include "exprkg/text.hpp"

namespace exprkg {

struct Iri {
    std::string text;

    Iri() = default;
    explicit Iri(std::string t) : text(std::move(t)) {
        if (text.empty()) throw StructuralError("IRI text must be non-empty");
    }
    friend bool operator==(const Iri&, const Iri&) = default;
};

struct Blank {
    std::uint64_t id = 0;
    friend bool operator==(const Blank&, const Blank&) = default;
};

struct Literal {
    std::string lexical;
    friend bool operator==(const Literal&, const Literal&) = default;
};

using Term = std::variant<Iri, Blank, Literal>;

inline bool is_literal(const Term& t) noexcept { return std::holds_alternative<Literal>(t); }
inline bool is_blank(const Term& t) noexcept { return std::holds_alternative<Blank>(t); }
inline bool is_iri(const Term& t) noexcept { return std::holds_alternative<Iri>(t); }

inline std::string blank_label(const Blank& b) { return "_:b" + std::to_string(b.id); }

/// Walk/embedding token for a term: IRI text, `_:bN` for blanks, lexical form for literals.
inline std::string term_label(const Term& t) {
    return std::visit(
        [](const auto& v) -> std::string {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, Iri>) return v.text;
            else if constexpr (std::is_same_v<V, Blank>) return blank_label(v);
            else return v.lexical;
        },
        t);
}

struct TermHash {
    std::size_t operator()(const Term& t) const noexcept {
        std::size_t h = std::visit(
            [](const auto& v) -> std::size_t {
                using V = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<V, Iri>) return std::hash<std::string>{}(v.text);
                else if constexpr (std::is_same_v<V, Blank>) return std::hash<std::uint64_t>{}(v.id);
                else return std::hash<std::string>{}(v.lexical);
            },
            t);
        return h ^ (t.index() * 0x9e3779b97f4a7c15ULL);
    }
};

struct Triple {
    Term subject;
    Iri predicate;
    Term object;
    friend bool operator==(const Triple&, const Triple&) = default;
};

struct GraphStats {
    std::size_t triples = 0;
    std::size_t predicates = 0;
    std::size_t nodes = 0;
    friend bool operator==(const GraphStats&, const GraphStats&) = default;
};

class Graph {
public:
    using TermId = std::uint32_t;

    struct Edge {
        TermId predicate;
        TermId object;
    };

    /// Inserts a triple; returns false if it was already present.
    bool insert(const Triple& t) { return insert(t.subject, t.predicate, t.object); }

    bool insert(const Term& subject, const Iri& predicate, const Term& object) {
        if (is_literal(subject)) throw StructuralError("literal in subject position: \"" + term_label(subject) + "\"");
        if (predicate.text.empty()) throw StructuralError("predicate IRI must be non-empty");
        TermId s = intern(subject);
        TermId p = intern(Term{predicate});
        TermId o = intern(object);
        if (!keys_.insert(key(s, p, o)).second) return false;
        triples_.push_back({s, p, o});
        out_[s].push_back({p, o});
        if (!is_predicate_[p]) {
            is_predicate_[p] = true;
            ++predicate_count_;
        }
        mark_node(s);
        mark_node(o);
        return true;
    }

    bool contains(const Triple& t) const {
        auto s = find(t.subject);
        auto p = find(Term{t.predicate});
        auto o = find(t.object);
        return s && p && o && keys_.count(key(*s, *p, *o)) != 0;
    }

    /// (predicate, object) pairs with this subject, in insertion order.
    std::vector<std::pair<Iri, Term>> outgoing(const Term& subject) const {
        std::vector<std::pair<Iri, Term>> out;
        auto s = find(subject);
        if (!s) return out;
        for (const Edge& e : out_[*s]) out.emplace_back(std::get<Iri>(terms_[e.predicate]), terms_[e.object]);
        return out;
    }

    /// Fresh blank node; ids are monotone and never collide with blanks already in the graph.
    Blank fresh_blank() { return Blank{next_blank_++}; }

    GraphStats stats() const { return {triples_.size(), predicate_count_, node_count_}; }
    std::size_t size() const noexcept { return triples_.size(); }

    // Id-level access, used by the walker.
    std::optional<TermId> find(const Term& t) const {
        auto it = ids_.find(t);
        if (it == ids_.end()) return std::nullopt;
        return it->second;
    }
    std::optional<TermId> find_label(std::string_view label) const;
    const Term& term(TermId id) const { return terms_.at(id); }
    std::size_t term_count() const noexcept { return terms_.size(); }
    std::span<const Edge> out_edges(TermId id) const {
        return id < out_.size() ? std::span<const Edge>(out_[id]) : std::span<const Edge>{};
    }

    /// All triples in insertion order.
    std::vector<Triple> triples() const {
        std::vector<Triple> out;
        out.reserve(triples_.size());
        for (const auto& t : triples_)
            out.push_back({terms_[t.s], std::get<Iri>(terms_[t.p]), terms_[t.o]});
        return out;
    }

    /// Subjects of (?, predicate, object) in first-insertion order.
    std::vector<Term> subjects_with(const Iri& predicate, const Term& object) const {
        std::vector<Term> out;
        auto p = find(Term{predicate});
        auto o = find(object);
        if (!p || !o) return out;
        for (const auto& t : triples_)
            if (t.p == *p && t.o == *o) out.push_back(terms_[t.s]);
        return out;
    }

private:
    struct Encoded {
        TermId s, p, o;
    };

    struct Key {
        TermId s, p, o;
        friend bool operator==(const Key&, const Key&) = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept {
            std::uint64_t h = (static_cast<std::uint64_t>(k.s) << 32) | k.p;
            h ^= static_cast<std::uint64_t>(k.o) * 0x9e3779b97f4a7c15ULL;
            h ^= h >> 29;
            return static_cast<std::size_t>(h * 0xbf58476d1ce4e5b9ULL);
        }
    };

    static Key key(TermId s, TermId p, TermId o) noexcept { return {s, p, o}; }

    TermId intern(const Term& t) {
        auto [it, inserted] = ids_.try_emplace(t, static_cast<TermId>(terms_.size()));
        if (inserted) {
            terms_.push_back(t);
            out_.emplace_back();
            is_predicate_.push_back(false);
            is_node_.push_back(false);
            if (const auto* b = std::get_if<Blank>(&t); b && b->id >= next_blank_) next_blank_ = b->id + 1;
        }
        return it->second;
    }

    void mark_node(TermId id) {
        if (!is_node_[id]) {
            is_node_[id] = true;
            ++node_count_;
        }
    }

    std::vector<Term> terms_;
    std::unordered_map<Term, TermId, TermHash> ids_;
    std::vector<Encoded> triples_;
    std::unordered_set<Key, KeyHash> keys_;
    std::vector<std::vector<Edge>> out_;
    std::vector<bool> is_predicate_;
    std::vector<bool> is_node_;
    std::size_t predicate_count_ = 0;
    std::size_t node_count_ = 0;
    std::uint64_t next_blank_ = 0;
};

inline std::optional<Graph::TermId> Graph::find_label(std::string_view label) const {
    if (text::starts_with(label, "_:b")) {
        if (auto n = text::parse_int(label.substr(3)); n && *n >= 0 && label.size() > 3)
            return find(Term{Blank{static_cast<std::uint64_t>(*n)}});
    }
    if (label.empty()) return std::nullopt;
    return find(Term{Iri{std::string(label)}});
}

} // namespace exprkg

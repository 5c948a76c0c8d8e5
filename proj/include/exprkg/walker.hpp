#pragma once
// Forward random walks over the graph, producing the sentence corpus for
// embedding training. Sentences alternate node and predicate tokens:
//   node p1 node p2 node ...
// Edges whose object is a literal are never followed.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "exprkg/errors.hpp"
#include "exprkg/rdf_store.hpp"
#include "exprkg/text.hpp"

namespace exprkg {

struct WalkConfig {
    std::size_t walks_per_entity = 100;
    std::size_t max_depth = 4;
    std::uint64_t seed = 42;

    void validate() const {
        if (walks_per_entity == 0) throw ConfigError("walks-per-entity must be positive");
        if (max_depth == 0) throw ConfigError("walk depth must be positive");
    }
};

using Sentence = std::vector<std::string>;

struct WalkCorpus {
    std::vector<Sentence> sentences;

    std::size_t token_count() const {
        std::size_t n = 0;
        for (const auto& s : sentences) n += s.size();
        return n;
    }
    friend bool operator==(const WalkCorpus&, const WalkCorpus&) = default;
};

/// splitmix64 finalizer; turns (seed, ordinal) into well-spread RNG seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t ordinal) noexcept {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (ordinal + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace detail {

// Per node: the out-edges that may be walked (non-literal objects).
inline std::vector<std::vector<Graph::Edge>> walkable_edges(const Graph& g) {
    std::vector<std::vector<Graph::Edge>> out(g.term_count());
    for (Graph::TermId id = 0; id < g.term_count(); ++id)
        for (const auto& e : g.out_edges(id))
            if (!is_literal(g.term(e.object))) out[id].push_back(e);
    return out;
}

} // namespace detail

/// Walks from each start entity. Entity i uses an RNG seeded by mix_seed(seed, i), so the
/// corpus is identical for any worker count. Sentences are grouped by entity, in start order.
inline WalkCorpus generate_walks(const Graph& g, std::span<const Term> starts, const WalkConfig& config,
                                 unsigned workers = 1) {
    config.validate();
    std::vector<Graph::TermId> ids;
    ids.reserve(starts.size());
    for (const auto& t : starts) {
        auto id = g.find(t);
        if (!id || is_literal(t)) throw LookupError("walk start entity not in graph: " + term_label(t));
        ids.push_back(*id);
    }
    const auto edges = detail::walkable_edges(g);
    std::vector<std::string> labels(g.term_count());
    for (Graph::TermId id = 0; id < g.term_count(); ++id) labels[id] = term_label(g.term(id));

    WalkCorpus corpus;
    corpus.sentences.resize(ids.size() * config.walks_per_entity);

    auto walk_entity = [&](std::size_t ordinal) {
        std::mt19937_64 rng(mix_seed(config.seed, ordinal));
        for (std::size_t w = 0; w < config.walks_per_entity; ++w) {
            Sentence& s = corpus.sentences[ordinal * config.walks_per_entity + w];
            Graph::TermId node = ids[ordinal];
            s.push_back(labels[node]);
            for (std::size_t depth = 0; depth < config.max_depth; ++depth) {
                const auto& out = edges[node];
                if (out.empty()) break;
                std::uniform_int_distribution<std::size_t> pick(0, out.size() - 1);
                const Graph::Edge& e = out[pick(rng)];
                s.push_back(labels[e.predicate]);
                s.push_back(labels[e.object]);
                node = e.object;
            }
        }
    };

    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, ids.size()))));
    if (workers == 1) {
        for (std::size_t i = 0; i < ids.size(); ++i) walk_entity(i);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < ids.size(); i += workers) walk_entity(i);
            });
        for (auto& t : pool) t.join();
    }
    return corpus;
}

/// True iff the sentence has odd length and every (node, predicate, node) step is a stored triple.
inline bool walk_is_valid(const Graph& g, const Sentence& sentence) {
    if (sentence.empty() || sentence.size() % 2 == 0) return false;
    auto node = g.find_label(sentence[0]);
    if (!node) return false;
    for (std::size_t i = 1; i + 1 < sentence.size(); i += 2) {
        auto pred = g.find_label(sentence[i]);
        auto next = g.find_label(sentence[i + 1]);
        if (!pred || !next) return false;
        bool found = false;
        for (const auto& e : g.out_edges(*node))
            if (e.predicate == *pred && e.object == *next) {
                found = true;
                break;
            }
        if (!found) return false;
        node = next;
    }
    return true;
}

inline void write_corpus(std::ostream& out, const WalkCorpus& corpus) {
    for (const auto& s : corpus.sentences) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (i) out << ' ';
            out << text::escape_token(s[i]);
        }
        out << '\n';
    }
}

inline WalkCorpus read_corpus(std::istream& in) {
    WalkCorpus corpus;
    std::string line;
    while (std::getline(in, line)) {
        auto fields = text::split_ws(line);
        if (fields.empty()) continue;
        Sentence s;
        s.reserve(fields.size());
        for (auto f : fields) s.push_back(text::unescape_token(f));
        corpus.sentences.push_back(std::move(s));
    }
    return corpus;
}

} // namespace exprkg

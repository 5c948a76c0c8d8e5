#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "exprkg/synthkit.hpp"
#include "exprkg/kg_builder.hpp"
#include "exprkg/walker.hpp"

using namespace exprkg;

namespace {

Iri I(const std::string& s) { return Iri{"http://x/" + s}; }

} // namespace

TEST(Walker, ChainFollowsTheOnlyPath) {
    Graph g;
    g.insert(I("A"), I("p"), I("B"));
    g.insert(I("B"), I("q"), I("C"));
    WalkConfig cfg{1, 4, 42};
    std::vector<Term> starts{I("A")};
    auto corpus = generate_walks(g, starts, cfg);
    ASSERT_EQ(corpus.sentences.size(), 1u);
    EXPECT_EQ(corpus.sentences[0],
              (Sentence{"http://x/A", "http://x/p", "http://x/B", "http://x/q", "http://x/C"}));
}

TEST(Walker, IsolatedStartGivesSingleToken) {
    Graph g;
    g.insert(I("A"), I("p"), I("B"));
    std::vector<Term> starts{I("B")};
    auto corpus = generate_walks(g, starts, WalkConfig{3, 4, 1});
    ASSERT_EQ(corpus.sentences.size(), 3u);
    for (const auto& s : corpus.sentences) EXPECT_EQ(s, (Sentence{"http://x/B"}));
}

TEST(Walker, LiteralsAreNotWalked) {
    Graph g;
    g.insert(I("A"), I("label"), Literal{"x"});
    g.insert(I("A"), I("p"), I("B"));
    std::vector<Term> starts{I("A")};
    auto corpus = generate_walks(g, starts, WalkConfig{50, 2, 3});
    for (const auto& s : corpus.sentences) {
        ASSERT_EQ(s.size(), 3u);
        EXPECT_EQ(s[2], "http://x/B");
    }
}

TEST(Walker, UnknownStartIsLookupError) {
    Graph g;
    g.insert(I("A"), I("p"), I("B"));
    std::vector<Term> starts{I("Z")};
    EXPECT_THROW(generate_walks(g, starts, WalkConfig{}), LookupError);
}

TEST(Walker, StarBranchesAreRoughlyUniform) {
    Graph g;
    g.insert(I("A"), I("p"), I("B"));
    g.insert(I("A"), I("p"), I("C"));
    std::vector<Term> starts{I("A")};
    auto corpus = generate_walks(g, starts, WalkConfig{1000, 1, 42});
    std::size_t b = 0;
    for (const auto& s : corpus.sentences) b += s[2] == "http://x/B";
    EXPECT_GE(b, 400u);
    EXPECT_LE(b, 600u);
}

TEST(Walker, ValidityCoverageAndLengthOnSyntheticKg) {
    SynthConfig sc;
    sc.target_samples = 20;
    sc.aux_samples = 16;
    auto suite = generate_suite(sc);
    auto kg = assemble_kg(suite.datasets, parse_domain(suite), parse_mapping(suite), KgBuildConfig{});
    std::vector<Term> starts;
    for (const auto& gene : suite.datasets[0].genes) starts.push_back(Namespace{}.gene(gene));
    WalkConfig cfg{10, 4, 7};
    auto corpus = generate_walks(kg.graph, starts, cfg);
    ASSERT_EQ(corpus.sentences.size(), starts.size() * cfg.walks_per_entity);
    for (std::size_t i = 0; i < corpus.sentences.size(); ++i) {
        const auto& s = corpus.sentences[i];
        EXPECT_TRUE(walk_is_valid(kg.graph, s));
        EXPECT_EQ(s[0], term_label(starts[i / cfg.walks_per_entity]));
        EXPECT_LE(s.size(), 2 * cfg.max_depth + 1);
        EXPECT_EQ(s.size() % 2, 1u);
    }
}

TEST(Walker, WalkIsValidRejectsForgedSteps) {
    Graph g;
    g.insert(I("A"), I("p"), I("B"));
    EXPECT_TRUE(walk_is_valid(g, {"http://x/A", "http://x/p", "http://x/B"}));
    EXPECT_FALSE(walk_is_valid(g, {"http://x/B", "http://x/p", "http://x/A"}));
    EXPECT_FALSE(walk_is_valid(g, {"http://x/A", "http://x/p"}));
    EXPECT_FALSE(walk_is_valid(g, {}));
}

TEST(Walker, DeterministicAcrossRunsAndWorkerCounts) {
    SynthConfig sc;
    sc.target_samples = 10;
    sc.aux_samples = 10;
    auto suite = generate_suite(sc);
    auto kg = assemble_kg(suite.datasets, parse_domain(suite), parse_mapping(suite), KgBuildConfig{});
    std::vector<Term> starts;
    for (const auto& gene : suite.datasets[1].genes) starts.push_back(Namespace{}.gene(gene));
    WalkConfig cfg{5, 4, 99};
    auto a = generate_walks(kg.graph, starts, cfg, 1);
    EXPECT_EQ(a, generate_walks(kg.graph, starts, cfg, 1));
    EXPECT_EQ(a, generate_walks(kg.graph, starts, cfg, 4));
    cfg.seed = 100;
    EXPECT_NE(a, generate_walks(kg.graph, starts, cfg, 1));
}

TEST(Walker, CorpusRoundTrip) {
    WalkCorpus c;
    c.sentences = {{"_:b1", "http://x/p q", "100%"}, {"solo"}};
    std::ostringstream out;
    write_corpus(out, c);
    std::istringstream in(out.str());
    EXPECT_EQ(read_corpus(in), c);
}

TEST(Walker, RejectsBadConfig) {
    Graph g;
    g.insert(I("A"), I("p"), I("B"));
    std::vector<Term> starts{I("A")};
    EXPECT_THROW(generate_walks(g, starts, WalkConfig{0, 4, 1}), ConfigError);
    EXPECT_THROW(generate_walks(g, starts, WalkConfig{1, 0, 1}), ConfigError);
}

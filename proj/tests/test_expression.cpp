#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "exprkg/expression.hpp"

using namespace exprkg;

namespace {

ExpressionDataset parse(const std::string& s, const std::string& id = "D") {
    std::istringstream in(s);
    return parse_expression_tsv(in, id);
}

ExpressionDataset random_dataset(std::mt19937_64& rng, std::size_t samples, std::size_t genes, double missing) {
    ExpressionDataset ds;
    ds.id = "R";
    for (std::size_t j = 0; j < genes; ++j) ds.genes.push_back("g" + std::to_string(j));
    std::normal_distribution<double> v(0.0, 3.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < samples; ++i) {
        Sample s{"s" + std::to_string(i), i % 2 ? Label::Case : Label::Control, {}};
        for (std::size_t j = 0; j < genes; ++j) s.values.push_back(u(rng) < missing ? std::nullopt : std::optional(v(rng)));
        s.values[0] = v(rng);  // every gene column keeps a value below
        ds.samples.push_back(std::move(s));
    }
    return ds;
}

} // namespace

TEST(ExpressionTsv, ParsesSmallTable) {
    auto ds = parse("sample_id\tlabel\tg1\tg2\ns1\tcase\t1.5\t-2\ns2\tcontrol\t0\t3e-1\n");
    EXPECT_EQ(ds.genes, (std::vector<std::string>{"g1", "g2"}));
    ASSERT_EQ(ds.samples.size(), 2u);
    EXPECT_EQ(ds.samples[0].label, Label::Case);
    EXPECT_DOUBLE_EQ(*ds.samples[1].values[1], 0.3);
}

TEST(ExpressionTsv, NaIsMissing) {
    auto ds = parse("sample_id\tlabel\tg1\tg2\ns1\tcase\tNA\t1\ns2\tcontrol\t2\t3\n");
    EXPECT_FALSE(ds.samples[0].values[0].has_value());
    EXPECT_TRUE(ds.samples[0].values[1].has_value());
}

TEST(ExpressionTsv, RaggedRowNamesTheRow) {
    try {
        parse("sample_id\tlabel\tg1\tg2\ns1\tcase\t1\t2\ns2\tcontrol\t1\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(ExpressionTsv, RejectsBadInput) {
    EXPECT_THROW(parse("sample_id\tlabel\tg1\ns1\tcase\t1\ns1\tcontrol\t2\n"), ParseError);       // dup sample
    EXPECT_THROW(parse("sample_id\tlabel\tg1\tg1\ns1\tcase\t1\t1\ns2\tcontrol\t2\t2\n"), ParseError);  // dup gene
    EXPECT_THROW(parse("sample_id\tlabel\tg1\ns1\tsick\t1\ns2\tcontrol\t2\n"), ParseError);       // label
    EXPECT_THROW(parse("sample_id\tlabel\tg1\ns1\tcase\tabc\ns2\tcontrol\t2\n"), ParseError);     // cell
    EXPECT_THROW(parse("sample_id\tlabel\tg1\ns1\tcase\t1\ns2\tcase\t2\n"), ParseError);          // one class
    EXPECT_THROW(parse(""), ParseError);
}

TEST(GeneMean, Basics) {
    auto ds = parse("sample_id\tlabel\ta\tb\ns1\tcase\t1\t5\ns2\tcontrol\t2\tNA\ns3\tcase\t3\tNA\n");
    EXPECT_DOUBLE_EQ(gene_mean(ds, "a"), 2.0);
    EXPECT_DOUBLE_EQ(gene_mean(ds, "b"), 5.0);
    EXPECT_THROW(gene_mean(ds, "zzz"), LookupError);
}

TEST(GeneMean, AllMissingIsUndefined) {
    auto ds = parse("sample_id\tlabel\ta\ns1\tcase\tNA\ns2\tcontrol\tNA\n");
    EXPECT_THROW(gene_mean(ds, "a"), UndefinedError);
}

TEST(GeneMean, MatchesIndependentSummationAndLiesInRange) {
    std::mt19937_64 rng(5);
    auto ds = random_dataset(rng, 20, 6, 0.2);
    for (std::size_t j = 0; j < ds.genes.size(); ++j) {
        long double sum = 0;
        int n = 0;
        double lo = 1e300, hi = -1e300;
        for (const auto& s : ds.samples)
            if (s.values[j]) {
                sum += *s.values[j];
                ++n;
                lo = std::min(lo, *s.values[j]);
                hi = std::max(hi, *s.values[j]);
            }
        const double m = gene_mean(ds, j);
        EXPECT_NEAR(m, static_cast<double>(sum / n), 1e-12);
        EXPECT_GE(m, lo);
        EXPECT_LE(m, hi);
    }
}

TEST(SharedGenes, Cases) {
    ExpressionDataset a{"A", {"g1", "g2"}, {}}, b{"B", {"g2", "g3"}, {}}, c{"C", {"x", "y"}, {}};
    EXPECT_EQ(shared_genes(a, b), (std::set<std::string>{"g2"}));
    EXPECT_TRUE(shared_genes(a, c).empty());
    EXPECT_EQ(shared_genes(a, a), (std::set<std::string>{"g1", "g2"}));
}

TEST(ExpressionTsv, RoundTripProperty) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        std::mt19937_64 rng(seed);
        auto ds = random_dataset(rng, 8, 5, 0.25);
        std::ostringstream out;
        write_expression_tsv(out, ds);
        EXPECT_EQ(parse(out.str(), "R"), ds);
    }
}

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "exprkg/embedder.hpp"
#include "oracles.hpp"

using namespace exprkg;

namespace {

WalkCorpus corpus_of(std::vector<Sentence> s) { return WalkCorpus{std::move(s)}; }

WalkCorpus toy_corpus() {
    std::vector<Sentence> s;
    for (int i = 0; i < 40; ++i) {
        s.push_back({"a", "p", "b", "q", "c"});
        s.push_back({"d", "p", "e", "r", "f"});
    }
    return corpus_of(s);
}

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t d, double scale) {
    std::normal_distribution<double> n(0.0, scale);
    std::vector<double> v(d);
    for (auto& x : v) x = n(rng);
    return v;
}

} // namespace

TEST(Vocabulary, CountsAndOrdering) {
    auto v = build_vocab(corpus_of({{"a", "b", "a"}}), 0);
    ASSERT_EQ(v.size(), 2u);
    EXPECT_EQ(v.token(0), "a");
    EXPECT_EQ(v.count(0), 2u);
    EXPECT_EQ(v.token(1), "b");
    EXPECT_EQ(v.count(1), 1u);
}

TEST(Vocabulary, MinCountFilters) {
    auto v = build_vocab(corpus_of({{"a", "b", "a"}}), 2);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v.token(0), "a");
    EXPECT_THROW(build_vocab(corpus_of({{"a"}}), 5), ConfigError);
    EXPECT_THROW(build_vocab(WalkCorpus{}, 0), ConfigError);
}

TEST(Vocabulary, NoiseDistributionUsesThreeQuarterPower) {
    std::vector<std::string> s(8, "a");
    s.push_back("b");
    auto v = build_vocab(corpus_of({s}), 0);
    const double expected = std::pow(8.0, 0.75) / (std::pow(8.0, 0.75) + 1.0);
    EXPECT_NEAR(v.noise_probability(0), expected, 1e-12);
    EXPECT_NEAR(v.noise_probability(0), 0.8262, 1e-4);
}

TEST(Sgns, ZeroVectorsGiveTwoLogTwo) {
    std::vector<double> z(4, 0.0);
    std::vector<std::vector<double>> negs{z};
    auto g = sgns_loss_and_grads(z, z, negs);
    EXPECT_NEAR(g.loss, 2.0 * std::log(2.0), 1e-12);
}

TEST(Sgns, LossMatchesDefinition) {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 20; ++i) {
        auto v = random_vec(rng, 6, 1.0), u = random_vec(rng, 6, 1.0);
        std::vector<std::vector<double>> negs{random_vec(rng, 6, 1.0), random_vec(rng, 6, 1.0)};
        EXPECT_NEAR(sgns_loss_and_grads(v, u, negs).loss, oracle::sgns_loss(v, u, negs), 1e-10);
    }
}

TEST(Sgns, GradientsMatchFiniteDifferences) {
    std::mt19937_64 rng(2024);
    const double h = 1e-5;
    double worst = 0.0;
    for (int c = 0; c < 100; ++c) {
        const std::size_t d = 3 + c % 6;
        auto v = random_vec(rng, d, 0.5), u = random_vec(rng, d, 0.5);
        std::vector<std::vector<double>> negs;
        for (int k = 0; k < 1 + c % 4; ++k) negs.push_back(random_vec(rng, d, 0.5));
        auto g = sgns_loss_and_grads(v, u, negs);
        auto check = [&](double analytic, double numeric) {
            const double rel = std::abs(analytic - numeric) / std::max(1e-6, std::abs(analytic) + std::abs(numeric));
            worst = std::max(worst, rel);
        };
        for (std::size_t i = 0; i < d; ++i) {
            check(g.center[i], oracle::central_difference([&](const auto& x) { return oracle::sgns_loss(x, u, negs); }, v, i, h));
            check(g.context[i], oracle::central_difference([&](const auto& x) { return oracle::sgns_loss(v, x, negs); }, u, i, h));
            for (std::size_t k = 0; k < negs.size(); ++k)
                check(g.negatives[k][i], oracle::central_difference(
                                             [&](const auto& x) {
                                                 auto n2 = negs;
                                                 n2[k] = x;
                                                 return oracle::sgns_loss(v, u, n2);
                                             },
                                             negs[k], i, h));
        }
    }
    EXPECT_LT(worst, 1e-4);
}

TEST(Sgns, SaturatedLossIsTiny) {
    std::vector<double> v{10, 10}, u{10, 10}, n{-10, -10};
    std::vector<std::vector<double>> negs{n};
    EXPECT_LT(sgns_loss_and_grads(v, u, negs).loss, 1e-8);
}

TEST(Sgns, DimensionMismatchRejected) {
    std::vector<double> v{1, 2}, u{1, 2, 3};
    EXPECT_THROW(sgns_loss_and_grads(v, u, {}), ConfigError);
}

TEST(Sgns, StepEqualsGradientDescent) {
    std::mt19937_64 rng(9);
    const std::size_t d = 5;
    const float lr = 0.1f;
    auto v = random_vec(rng, d, 0.5), u = random_vec(rng, d, 0.5), n = random_vec(rng, d, 0.5);
    std::vector<std::vector<double>> negs{n};
    auto g = sgns_loss_and_grads(v, u, negs);
    std::vector<float> vf(v.begin(), v.end()), uf(u.begin(), u.end()), nf(n.begin(), n.end()), scratch(d);
    std::vector<float*> np{nf.data()};
    const double loss = sgns_step(vf.data(), uf.data(), np, d, lr, scratch.data());
    EXPECT_NEAR(loss, g.loss, 1e-5);
    for (std::size_t i = 0; i < d; ++i) {
        EXPECT_NEAR(vf[i], v[i] - lr * g.center[i], 1e-5);
        EXPECT_NEAR(uf[i], u[i] - lr * g.context[i], 1e-5);
        EXPECT_NEAR(nf[i], n[i] - lr * g.negatives[0][i], 1e-5);
    }
}

TEST(Train, LossDecreasesOverEpochs) {
    TrainConfig cfg;
    cfg.dimension = 16;
    cfg.epochs = 5;
    auto m = train(toy_corpus(), cfg);
    ASSERT_EQ(m.epoch_losses().size(), 5u);
    EXPECT_LT(m.epoch_losses().back(), m.epoch_losses().front());
}

TEST(Train, ZeroEpochsReturnsInitialization) {
    TrainConfig cfg;
    cfg.dimension = 8;
    cfg.epochs = 0;
    auto corpus = toy_corpus();
    auto m = train(corpus, cfg);
    auto init = init_model(build_vocab(corpus, 0), cfg);
    EXPECT_TRUE(std::equal(m.input_matrix().begin(), m.input_matrix().end(), init.input_matrix().begin()));
    const float bound = 0.5f / 8.0f;
    for (float x : m.input_matrix()) EXPECT_LE(std::abs(x), bound);
}

TEST(Train, SingleWorkerIsDeterministic) {
    TrainConfig cfg;
    cfg.dimension = 12;
    cfg.epochs = 2;
    auto a = train(toy_corpus(), cfg), b = train(toy_corpus(), cfg);
    EXPECT_TRUE(std::equal(a.input_matrix().begin(), a.input_matrix().end(), b.input_matrix().begin()));
    cfg.seed = 43;
    auto c = train(toy_corpus(), cfg);
    EXPECT_FALSE(std::equal(a.input_matrix().begin(), a.input_matrix().end(), c.input_matrix().begin()));
}

TEST(Train, MultiWorkerProducesFiniteVectors) {
    TrainConfig cfg;
    cfg.dimension = 8;
    cfg.workers = 3;
    auto m = train(toy_corpus(), cfg);
    for (float x : m.input_matrix()) EXPECT_TRUE(std::isfinite(x));
    EXPECT_EQ(m.epoch_losses().size(), cfg.epochs);
}

TEST(Train, ContextSharingTokensEndUpCloser) {
    // a and d share contexts {p, b}, {p, e} pattern differs; b and e share predicate p on both sides.
    TrainConfig cfg;
    cfg.dimension = 16;
    cfg.epochs = 20;
    auto m = train(toy_corpus(), cfg);
    auto cos = [&](const char* x, const char* y) {
        auto a = m.embedding(x), b = m.embedding(y);
        double dot = 0, na = 0, nb = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            dot += a[i] * b[i];
            na += a[i] * a[i];
            nb += b[i] * b[i];
        }
        return dot / std::sqrt(na * nb);
    };
    EXPECT_GT(cos("a", "c"), cos("a", "f"));
}

TEST(Model, OutOfVocabularyLookup) {
    TrainConfig cfg;
    cfg.dimension = 4;
    cfg.epochs = 1;
    auto m = train(toy_corpus(), cfg);
    EXPECT_FALSE(m.contains("zzz"));
    EXPECT_THROW(m.embedding("zzz"), LookupError);
}

TEST(Model, Word2VecRoundTrip) {
    TrainConfig cfg;
    cfg.dimension = 6;
    cfg.epochs = 1;
    auto m = train(toy_corpus(), cfg);
    std::ostringstream out;
    write_word2vec(out, m);
    std::istringstream in(out.str());
    auto back = read_word2vec(in);
    ASSERT_EQ(back.vocabulary().size(), m.vocabulary().size());
    ASSERT_EQ(back.dimension(), m.dimension());
    for (const auto& t : m.vocabulary().tokens()) {
        auto a = m.embedding(t), b = back.embedding(t);
        for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-6);
    }
}

TEST(Model, Word2VecRejectsMalformed) {
    std::istringstream bad_header("3\n");
    EXPECT_THROW(read_word2vec(bad_header), ParseError);
    std::istringstream short_row("1 2\ntok 0.5\n");
    EXPECT_THROW(read_word2vec(short_row), ParseError);
    std::istringstream wrong_count("2 1\ntok 0.5\n");
    EXPECT_THROW(read_word2vec(wrong_count), ParseError);
}

TEST(Train, RejectsBadConfig) {
    TrainConfig cfg;
    cfg.dimension = 1;
    EXPECT_THROW(train(toy_corpus(), cfg), ConfigError);
    cfg = {};
    cfg.learning_rate = 0;
    EXPECT_THROW(train(toy_corpus(), cfg), ConfigError);
}

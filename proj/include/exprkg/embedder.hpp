#pragma once
// Skip-gram with negative sampling over the walk corpus.
//
// For a center token c with input vector v, a context token o with output
// vector u_o and negatives k with output vectors u_k, the per-pair loss is
//
//   L = -log s(u_o . v) - sum_k log s(-u_k . v),   s(x) = 1 / (1 + e^-x)
//
// and training takes one SGD step on L for every (center, context) pair.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

#include "exprkg/errors.hpp"
#include "exprkg/text.hpp"
#include "exprkg/walker.hpp"

namespace exprkg {

struct TrainConfig {
    std::size_t dimension = 100;
    std::size_t window = 5;
    std::size_t negatives = 5;
    std::size_t epochs = 5;
    double learning_rate = 0.025;
    std::size_t min_count = 0;
    std::uint64_t seed = 42;
    unsigned workers = 1;

    void validate() const {
        if (dimension < 2) throw ConfigError("embedding dimension must be >= 2");
        if (window == 0) throw ConfigError("window must be positive");
        if (negatives == 0) throw ConfigError("negatives per positive must be positive");
        if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
        if (workers == 0) throw ConfigError("workers must be positive");
    }
};

inline constexpr double kNoiseExponent = 0.75;
inline constexpr double kMinLearningRateFraction = 1e-4;

class Vocabulary {
public:
    std::size_t size() const noexcept { return tokens_.size(); }
    bool empty() const noexcept { return tokens_.empty(); }
    const std::string& token(std::size_t i) const { return tokens_.at(i); }
    std::uint64_t count(std::size_t i) const { return counts_.at(i); }
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }

    std::optional<std::uint32_t> find(std::string_view token) const {
        auto it = index_.find(std::string(token));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    /// Negative-sampling probability of token i (proportional to count^0.75).
    double noise_probability(std::size_t i) const {
        return cdf_.at(i) - (i == 0 ? 0.0 : cdf_[i - 1]);
    }

    template <class Rng>
    std::uint32_t sample_noise(Rng& rng) const {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u(rng));
        auto i = static_cast<std::size_t>(it - cdf_.begin());
        return static_cast<std::uint32_t>(std::min(i, cdf_.size() - 1));
    }

    void add(std::string token, std::uint64_t count) {
        index_.emplace(token, static_cast<std::uint32_t>(tokens_.size()));
        tokens_.push_back(std::move(token));
        counts_.push_back(count);
    }

    void finalize_noise() {
        cdf_.assign(tokens_.size(), 0.0);
        double total = 0.0;
        for (std::size_t i = 0; i < tokens_.size(); ++i) {
            total += std::pow(static_cast<double>(counts_[i]), kNoiseExponent);
            cdf_[i] = total;
        }
        if (total > 0.0)
            for (auto& c : cdf_) c /= total;
    }

private:
    std::vector<std::string> tokens_;
    std::vector<std::uint64_t> counts_;
    std::unordered_map<std::string, std::uint32_t> index_;
    std::vector<double> cdf_;
};

/// Tokens with frequency >= min_count, ordered by descending frequency then lexicographically.
inline Vocabulary build_vocab(const WalkCorpus& corpus, std::size_t min_count) {
    if (corpus.sentences.empty()) throw ConfigError("cannot build a vocabulary from an empty corpus");
    std::unordered_map<std::string, std::uint64_t> freq;
    for (const auto& s : corpus.sentences)
        for (const auto& t : s) ++freq[t];
    std::vector<std::pair<std::string, std::uint64_t>> kept;
    for (auto& [t, c] : freq)
        if (c >= min_count) kept.emplace_back(t, c);
    if (kept.empty()) throw ConfigError("vocabulary is empty after min-count filtering");
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    Vocabulary v;
    for (auto& [t, c] : kept) v.add(std::move(t), c);
    v.finalize_noise();
    return v;
}

/// -log s(x), computed without overflow.
inline double neg_log_sigmoid(double x) noexcept {
    return x >= 0.0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

inline double sigmoid(double x) noexcept {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

struct SgnsGradients {
    double loss = 0.0;
    std::vector<double> center;
    std::vector<double> context;
    std::vector<std::vector<double>> negatives;
};

/// Loss and exact gradients of the SGNS objective for one (center, context, negatives) group.
inline SgnsGradients sgns_loss_and_grads(std::span<const double> center, std::span<const double> context,
                                         std::span<const std::vector<double>> negatives) {
    const std::size_t d = center.size();
    if (context.size() != d) throw ConfigError("sgns: context vector dimension mismatch");
    for (const auto& n : negatives)
        if (n.size() != d) throw ConfigError("sgns: negative vector dimension mismatch");

    auto dot = [d](std::span<const double> a, std::span<const double> b) {
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) s += a[i] * b[i];
        return s;
    };

    SgnsGradients g;
    g.center.assign(d, 0.0);
    g.context.assign(d, 0.0);

    const double pos = dot(context, center);
    g.loss += neg_log_sigmoid(pos);
    const double coef_pos = sigmoid(pos) - 1.0;  // d/dx of -log s(x)
    for (std::size_t i = 0; i < d; ++i) {
        g.center[i] += coef_pos * context[i];
        g.context[i] = coef_pos * center[i];
    }
    for (const auto& n : negatives) {
        const double x = dot(n, center);
        g.loss += neg_log_sigmoid(-x);
        const double coef = sigmoid(x);  // d/dx of -log s(-x)
        std::vector<double> gn(d);
        for (std::size_t i = 0; i < d; ++i) {
            g.center[i] += coef * n[i];
            gn[i] = coef * center[i];
        }
        g.negatives.push_back(std::move(gn));
    }
    return g;
}

namespace detail {

template <bool Shared>
inline float load(const float& x) noexcept {
    if constexpr (Shared) return std::atomic_ref<float>(const_cast<float&>(x)).load(std::memory_order_relaxed);
    else return x;
}

template <bool Shared>
inline void store(float& x, float v) noexcept {
    if constexpr (Shared) std::atomic_ref<float>(x).store(v, std::memory_order_relaxed);
    else x = v;
}

} // namespace detail

/// One in-place SGD step of size lr on the SGNS loss; returns the loss before the step.
/// `scratch` must hold at least `dim` floats. All gradients are evaluated at the pre-step center vector.
template <bool Shared = false>
inline double sgns_step(float* center, float* context, std::span<float* const> negatives, std::size_t dim,
                        float lr, float* scratch) noexcept {
    using detail::load;
    using detail::store;
    double loss = 0.0;
    std::fill(scratch, scratch + dim, 0.0f);
    auto visit = [&](float* out, bool positive) {
        float dot = 0.0f;
        for (std::size_t i = 0; i < dim; ++i) dot += load<Shared>(center[i]) * load<Shared>(out[i]);
        const double x = dot;
        loss += positive ? neg_log_sigmoid(x) : neg_log_sigmoid(-x);
        const float coef = static_cast<float>(positive ? sigmoid(x) - 1.0 : sigmoid(x));
        for (std::size_t i = 0; i < dim; ++i) {
            const float u = load<Shared>(out[i]);
            scratch[i] += coef * u;
            store<Shared>(out[i], u - lr * coef * load<Shared>(center[i]));
        }
    };
    visit(context, true);
    for (float* n : negatives) visit(n, false);
    for (std::size_t i = 0; i < dim; ++i) store<Shared>(center[i], load<Shared>(center[i]) - lr * scratch[i]);
    return loss;
}

class EmbeddingModel {
public:
    EmbeddingModel() = default;
    EmbeddingModel(Vocabulary vocab, std::size_t dim, std::vector<float> input, std::vector<float> output)
        : vocab_(std::move(vocab)), dim_(dim), input_(std::move(input)), output_(std::move(output)) {}

    const Vocabulary& vocabulary() const noexcept { return vocab_; }
    std::size_t dimension() const noexcept { return dim_; }
    std::span<const float> input_matrix() const noexcept { return input_; }
    std::span<const float> output_matrix() const noexcept { return output_; }
    std::span<float> input_matrix() noexcept { return input_; }
    std::span<float> output_matrix() noexcept { return output_; }
    const std::vector<double>& epoch_losses() const noexcept { return epoch_losses_; }
    std::vector<double>& epoch_losses() noexcept { return epoch_losses_; }

    bool contains(std::string_view token) const { return vocab_.find(token).has_value(); }

    /// The token's input-matrix row.
    std::span<const float> embedding(std::string_view token) const {
        auto i = vocab_.find(token);
        if (!i) throw LookupError("token not in embedding vocabulary: " + std::string(token));
        return std::span<const float>(input_).subspan(static_cast<std::size_t>(*i) * dim_, dim_);
    }

private:
    Vocabulary vocab_;
    std::size_t dim_ = 0;
    std::vector<float> input_;
    std::vector<float> output_;
    std::vector<double> epoch_losses_;
};

namespace detail {

template <bool Shared>
struct EpochWorker {
    const std::vector<std::vector<std::uint32_t>>& sentences;
    const Vocabulary& vocab;
    const TrainConfig& config;
    float* input;
    float* output;
    std::size_t total_positions;  // over all epochs, for this worker
    std::size_t processed = 0;
    std::mt19937_64 rng;
    double loss_sum = 0.0;
    std::size_t steps = 0;

    void run(std::size_t first, std::size_t stride) {
        const std::size_t d = config.dimension;
        std::vector<float> scratch(d);
        std::vector<float*> negs(config.negatives);
        std::uniform_int_distribution<std::size_t> window_pick(1, config.window);
        const bool can_sample = vocab.size() > 1;
        for (std::size_t si = first; si < sentences.size(); si += stride) {
            const auto& s = sentences[si];
            for (std::size_t pos = 0; pos < s.size(); ++pos) {
                const double progress = static_cast<double>(processed) / static_cast<double>(total_positions);
                const float lr = static_cast<float>(
                    config.learning_rate * std::max(kMinLearningRateFraction, 1.0 - progress));
                ++processed;
                const std::size_t b = window_pick(rng);
                const std::size_t lo = pos >= b ? pos - b : 0;
                const std::size_t hi = std::min(s.size() - 1, pos + b);
                float* center = input + static_cast<std::size_t>(s[pos]) * d;
                for (std::size_t c = lo; c <= hi; ++c) {
                    if (c == pos) continue;
                    const std::uint32_t ctx = s[c];
                    std::size_t n_neg = 0;
                    if (can_sample) {
                        for (std::size_t k = 0; k < config.negatives; ++k) {
                            std::uint32_t neg;
                            do neg = vocab.sample_noise(rng);
                            while (neg == ctx);
                            negs[n_neg++] = output + static_cast<std::size_t>(neg) * d;
                        }
                    }
                    loss_sum += sgns_step<Shared>(center, output + static_cast<std::size_t>(ctx) * d,
                                                  std::span<float* const>(negs.data(), n_neg), d, lr, scratch.data());
                    ++steps;
                }
            }
        }
    }
};

} // namespace detail

/// Initial matrices: both uniform in [-0.5/d, 0.5/d], input first, from one seeded stream.
inline EmbeddingModel init_model(Vocabulary vocab, const TrainConfig& config) {
    const std::size_t d = config.dimension;
    const float r = 0.5f / static_cast<float>(d);
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<float> u(-r, r);
    std::vector<float> input(vocab.size() * d);
    std::vector<float> output(vocab.size() * d);
    for (auto& x : input) x = u(rng);
    for (auto& x : output) x = u(rng);
    return EmbeddingModel(std::move(vocab), d, std::move(input), std::move(output));
}

/// Trains SGNS embeddings. With workers == 1 the result is bitwise reproducible from the seed;
/// with more workers updates to the shared matrices interleave freely.
inline EmbeddingModel train(const WalkCorpus& corpus, const TrainConfig& config) {
    config.validate();
    EmbeddingModel model = init_model(build_vocab(corpus, config.min_count), config);
    const Vocabulary& vocab = model.vocabulary();

    std::vector<std::vector<std::uint32_t>> sentences;
    sentences.reserve(corpus.sentences.size());
    for (const auto& s : corpus.sentences) {
        std::vector<std::uint32_t> ids;
        ids.reserve(s.size());
        for (const auto& t : s)
            if (auto i = vocab.find(t)) ids.push_back(*i);
        if (!ids.empty()) sentences.push_back(std::move(ids));
    }

    float* input = model.input_matrix().data();
    float* output = model.output_matrix().data();
    const unsigned workers = std::max(1u, config.workers);

    if (workers == 1) {
        std::size_t positions = 0;
        for (const auto& s : sentences) positions += s.size();
        detail::EpochWorker<false> w{sentences, vocab, config, input, output,
                                     std::max<std::size_t>(1, positions * config.epochs), 0,
                                     std::mt19937_64(mix_seed(config.seed, 0))};
        for (std::size_t e = 0; e < config.epochs; ++e) {
            w.loss_sum = 0.0;
            w.steps = 0;
            w.run(0, 1);
            model.epoch_losses().push_back(w.steps ? w.loss_sum / static_cast<double>(w.steps) : 0.0);
        }
        return model;
    }

    std::vector<detail::EpochWorker<true>> pool;
    pool.reserve(workers);
    for (unsigned k = 0; k < workers; ++k) {
        std::size_t positions = 0;
        for (std::size_t si = k; si < sentences.size(); si += workers) positions += sentences[si].size();
        pool.push_back({sentences, vocab, config, input, output, std::max<std::size_t>(1, positions * config.epochs), 0,
                        std::mt19937_64(mix_seed(config.seed, k))});
    }
    for (std::size_t e = 0; e < config.epochs; ++e) {
        std::vector<std::thread> threads;
        for (unsigned k = 0; k < workers; ++k) {
            pool[k].loss_sum = 0.0;
            pool[k].steps = 0;
            threads.emplace_back([&pool, k, workers] { pool[k].run(k, workers); });
        }
        for (auto& t : threads) t.join();
        double loss = 0.0;
        std::size_t steps = 0;
        for (const auto& w : pool) {
            loss += w.loss_sum;
            steps += w.steps;
        }
        model.epoch_losses().push_back(steps ? loss / static_cast<double>(steps) : 0.0);
    }
    return model;
}

/// word2vec text format: `|V| d`, then `token v1 ... vd` per line (input-matrix rows).
inline void write_word2vec(std::ostream& out, const EmbeddingModel& model) {
    const auto& vocab = model.vocabulary();
    const std::size_t d = model.dimension();
    out << vocab.size() << ' ' << d << '\n';
    auto m = model.input_matrix();
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        out << text::escape_token(vocab.token(i));
        for (std::size_t j = 0; j < d; ++j) out << ' ' << text::format_double(m[i * d + j], 9);
        out << '\n';
    }
}

inline EmbeddingModel read_word2vec(std::istream& in) {
    std::string line;
    std::size_t n = 0;
    if (!std::getline(in, line)) throw ParseError("empty embedding file");
    ++n;
    auto header = text::split_ws(line);
    if (header.size() != 2) throw ParseError("embedding header must be '<count> <dimension>'", n);
    auto count = text::parse_int(header[0]);
    auto dim = text::parse_int(header[1]);
    if (!count || !dim || *count < 0 || *dim < 1) throw ParseError("bad embedding header", n);
    const auto d = static_cast<std::size_t>(*dim);

    Vocabulary vocab;
    std::vector<float> input;
    input.reserve(static_cast<std::size_t>(*count) * d);
    while (std::getline(in, line)) {
        ++n;
        auto fields = text::split_ws(line);
        if (fields.empty()) continue;
        if (fields.size() != d + 1)
            throw ParseError("expected token plus " + std::to_string(d) + " values", n);
        auto token = text::unescape_token(fields[0]);
        if (vocab.find(token)) throw ParseError("duplicate token " + token, n);
        for (std::size_t j = 1; j <= d; ++j) {
            auto v = text::parse_double(fields[j]);
            if (!v) throw ParseError("non-numeric embedding value", n);
            input.push_back(static_cast<float>(*v));
        }
        vocab.add(std::move(token), 0);
    }
    if (vocab.size() != static_cast<std::size_t>(*count))
        throw ParseError("header announces " + std::to_string(*count) + " tokens, file has " +
                         std::to_string(vocab.size()));
    return EmbeddingModel(std::move(vocab), d, std::move(input), {});
}

} // namespace exprkg

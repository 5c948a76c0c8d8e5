#pragma once
// CART decision tree (Gini), binary classification metrics, stratified folds
// and the zero-filled merged feature space used by the merged baseline.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "exprkg/errors.hpp"
#include "exprkg/expression.hpp"

namespace exprkg {

inline double gini(std::size_t cases, std::size_t controls) {
    if (cases == 0 && controls == 0) throw UndefinedError("gini impurity of an empty node");
    const double n = static_cast<double>(cases + controls);
    const double pc = static_cast<double>(cases) / n;
    const double pn = static_cast<double>(controls) / n;
    return 1.0 - pc * pc - pn * pn;
}

struct TreeParams {
    std::optional<std::size_t> max_depth;  // nullopt = unlimited
    std::size_t min_samples_split = 2;
    std::uint64_t seed = 0;  // reserved; split search is exhaustive and deterministic

    void validate() const {
        if (max_depth && *max_depth == 0) throw ConfigError("tree max depth must be positive");
        if (min_samples_split < 2) throw ConfigError("min-samples-split must be >= 2");
    }
};

using FeatureMatrix = std::vector<std::vector<double>>;

/// Tolerance used when comparing impurities so ties resolve to the earliest candidate.
inline constexpr double kImpurityTolerance = 1e-12;

struct Split {
    std::size_t feature = 0;
    double threshold = 0.0;
    double impurity = 0.0;  // size-weighted Gini of the two children
};

/// Exhaustive search over midpoints between consecutive distinct values of every feature.
/// Ties go to the lower feature index, then the lower threshold.
inline std::optional<Split> best_split(const FeatureMatrix& X, std::span<const Label> y,
                                       std::span<const std::size_t> rows) {
    if (rows.size() < 2) return std::nullopt;
    const std::size_t n_features = X[rows[0]].size();
    std::size_t total_cases = 0;
    for (auto r : rows) total_cases += y[r] == Label::Case;
    const std::size_t n = rows.size();

    std::optional<Split> best;
    std::vector<std::size_t> order(rows.begin(), rows.end());
    for (std::size_t f = 0; f < n_features; ++f) {
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return X[a][f] < X[b][f]; });
        std::size_t left_cases = 0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            left_cases += y[order[i]] == Label::Case;
            const double a = X[order[i]][f];
            const double b = X[order[i + 1]][f];
            if (!(a < b)) continue;
            const std::size_t nl = i + 1;
            const std::size_t nr = n - nl;
            const std::size_t right_cases = total_cases - left_cases;
            const double imp = (static_cast<double>(nl) * gini(left_cases, nl - left_cases) +
                                static_cast<double>(nr) * gini(right_cases, nr - right_cases)) /
                               static_cast<double>(n);
            double threshold = a + (b - a) / 2.0;
            if (!(threshold < b)) threshold = a;
            if (!best || imp < best->impurity - kImpurityTolerance) best = Split{f, threshold, imp};
        }
    }
    return best;
}

class DecisionTree {
public:
    struct Node {
        std::size_t cases = 0;
        std::size_t controls = 0;
        std::optional<std::size_t> feature;  // set on internal nodes
        double threshold = 0.0;
        std::size_t left = 0;
        std::size_t right = 0;

        bool is_leaf() const noexcept { return !feature.has_value(); }
    };

    DecisionTree() = default;
    DecisionTree(std::vector<Node> nodes, std::size_t n_features) : nodes_(std::move(nodes)), n_features_(n_features) {}

    /// Case fraction of the leaf `x` is routed to (value <= threshold goes left).
    double predict_proba(std::span<const double> x) const {
        if (x.size() != n_features_)
            throw ConfigError("tree expects " + std::to_string(n_features_) + " features, got " +
                              std::to_string(x.size()));
        std::size_t i = 0;
        while (!nodes_[i].is_leaf()) i = x[*nodes_[i].feature] <= nodes_[i].threshold ? nodes_[i].left : nodes_[i].right;
        const auto& leaf = nodes_[i];
        return static_cast<double>(leaf.cases) / static_cast<double>(leaf.cases + leaf.controls);
    }

    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const Node& root() const { return nodes_.at(0); }
    std::size_t n_features() const noexcept { return n_features_; }

    std::size_t depth() const { return nodes_.empty() ? 0 : depth_from(0); }

private:
    std::size_t depth_from(std::size_t i) const {
        const auto& node = nodes_[i];
        if (node.is_leaf()) return 0;
        return 1 + std::max(depth_from(node.left), depth_from(node.right));
    }

    std::vector<Node> nodes_;
    std::size_t n_features_ = 0;
};

inline DecisionTree fit_tree(const FeatureMatrix& X, std::span<const Label> y, const TreeParams& params = {}) {
    params.validate();
    if (X.empty()) throw ConfigError("cannot fit a tree on an empty training set");
    if (X.size() != y.size()) throw ConfigError("feature rows and labels differ in length");
    const std::size_t n_features = X[0].size();
    for (const auto& row : X)
        if (row.size() != n_features) throw ConfigError("ragged feature matrix");

    std::vector<DecisionTree::Node> nodes;
    struct Work {
        std::size_t node;
        std::vector<std::size_t> rows;
        std::size_t depth;
    };
    std::vector<Work> stack;
    std::vector<std::size_t> all(X.size());
    std::iota(all.begin(), all.end(), 0);
    nodes.emplace_back();
    stack.push_back({0, std::move(all), 0});

    while (!stack.empty()) {
        Work w = std::move(stack.back());
        stack.pop_back();
        std::size_t cases = 0;
        for (auto r : w.rows) cases += y[r] == Label::Case;
        const std::size_t controls = w.rows.size() - cases;
        nodes[w.node].cases = cases;
        nodes[w.node].controls = controls;

        if (cases == 0 || controls == 0) continue;
        if (params.max_depth && w.depth >= *params.max_depth) continue;
        if (w.rows.size() < params.min_samples_split) continue;
        auto split = best_split(X, y, w.rows);
        if (!split || !(split->impurity < gini(cases, controls) - kImpurityTolerance)) continue;

        std::vector<std::size_t> left, right;
        for (auto r : w.rows) (X[r][split->feature] <= split->threshold ? left : right).push_back(r);
        const std::size_t li = nodes.size();
        nodes.emplace_back();
        const std::size_t ri = nodes.size();
        nodes.emplace_back();
        nodes[w.node].feature = split->feature;
        nodes[w.node].threshold = split->threshold;
        nodes[w.node].left = li;
        nodes[w.node].right = ri;
        stack.push_back({ri, std::move(right), w.depth + 1});
        stack.push_back({li, std::move(left), w.depth + 1});
    }
    return DecisionTree(std::move(nodes), n_features);
}

struct Metrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double waf = 0.0;
    double auc = 0.0;
    bool degenerate = false;  // some ratio had a zero denominator and was reported as 0
};

inline constexpr double kDecisionThreshold = 0.5;

/// Fraction of (case, control) pairs ranked correctly; ties count one half.
inline double auc_pairs(std::span<const Label> y, std::span<const double> scores) {
    if (y.size() != scores.size()) throw ConfigError("labels and scores differ in length");
    // Sort once and count with ranks: O(n log n), equal to the pair statistic.
    std::vector<std::size_t> idx(y.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double correct = 0.0;
    std::size_t controls_below = 0;
    std::size_t n_case = 0, n_control = 0;
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        std::size_t tie_cases = 0, tie_controls = 0;
        while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) {
            (y[idx[j]] == Label::Case ? tie_cases : tie_controls)++;
            ++j;
        }
        correct += static_cast<double>(tie_cases) *
                   (static_cast<double>(controls_below) + 0.5 * static_cast<double>(tie_controls));
        controls_below += tie_controls;
        n_case += tie_cases;
        n_control += tie_controls;
        i = j;
    }
    if (n_case == 0 || n_control == 0) throw UndefinedError("AUC is undefined when only one class is present");
    return correct / (static_cast<double>(n_case) * static_cast<double>(n_control));
}

inline Metrics compute_metrics(std::span<const Label> y, std::span<const double> scores,
                               double threshold = kDecisionThreshold) {
    if (y.empty()) throw ConfigError("cannot compute metrics on an empty set");
    if (y.size() != scores.size()) throw ConfigError("labels and scores differ in length");
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const bool predicted_case = scores[i] > threshold;
        if (y[i] == Label::Case) (predicted_case ? tp : fn)++;
        else (predicted_case ? fp : tn)++;
    }
    Metrics m;
    auto ratio = [&m](std::size_t num, std::size_t den) {
        if (den == 0) {
            m.degenerate = true;
            return 0.0;
        }
        return static_cast<double>(num) / static_cast<double>(den);
    };
    auto f_measure = [&m](double p, double r) {
        if (p + r == 0.0) {
            m.degenerate = true;
            return 0.0;
        }
        return 2.0 * p * r / (p + r);
    };
    const double n = static_cast<double>(y.size());
    m.accuracy = static_cast<double>(tp + tn) / n;
    m.precision = ratio(tp, tp + fp);
    m.recall = ratio(tp, tp + fn);
    m.f1 = f_measure(m.precision, m.recall);
    const double control_f1 = f_measure(ratio(tn, tn + fn), ratio(tn, tn + fp));
    m.waf = (static_cast<double>(tp + fn) * m.f1 + static_cast<double>(tn + fp) * control_f1) / n;
    m.auc = auc_pairs(y, scores);
    return m;
}

/// k disjoint folds over all indices; per class, fold sizes differ by at most one.
/// Within each class indices are shuffled by `seed`; classes are dealt round-robin,
/// continuing where the previous class stopped so total fold sizes stay balanced too.
inline std::vector<std::vector<std::size_t>> stratified_kfold(std::span<const Label> labels, std::size_t k,
                                                              std::uint64_t seed) {
    if (k < 2) throw ConfigError("need at least 2 folds");
    std::vector<std::size_t> cases, controls;
    for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] == Label::Case ? cases : controls).push_back(i);
    if (k > cases.size() || k > controls.size())
        throw ConfigError(std::to_string(k) + " folds exceed a class count (" + std::to_string(cases.size()) +
                          " case, " + std::to_string(controls.size()) + " control)");
    std::mt19937_64 rng(seed);
    std::shuffle(cases.begin(), cases.end(), rng);
    std::shuffle(controls.begin(), controls.end(), rng);

    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t next = 0;
    for (const auto* cls : {&cases, &controls})
        for (auto idx : *cls) {
            folds[next].push_back(idx);
            next = (next + 1) % k;
        }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

/// Union of all gene panels (target's order first) with zero for unmeasured or missing values.
class MergedFeatures {
public:
    const std::vector<std::string>& genes() const noexcept { return genes_; }

    void add_panel(const ExpressionDataset& ds) {
        for (const auto& g : ds.genes)
            if (index_.try_emplace(g, genes_.size()).second) genes_.push_back(g);
    }

    std::vector<double> row(const ExpressionDataset& ds, std::size_t sample) const {
        std::vector<double> out(genes_.size(), 0.0);
        const auto& s = ds.samples.at(sample);
        for (std::size_t j = 0; j < ds.genes.size(); ++j) {
            auto it = index_.find(ds.genes[j]);
            if (it != index_.end() && s.values[j]) out[it->second] = *s.values[j];
        }
        return out;
    }

private:
    std::vector<std::string> genes_;
    std::unordered_map<std::string, std::size_t> index_;
};

inline MergedFeatures merged_zero_features(const ExpressionDataset& target, std::span<const ExpressionDataset> aux) {
    MergedFeatures f;
    f.add_panel(target);
    for (const auto& ds : aux) f.add_panel(ds);
    return f;
}

} // namespace exprkg

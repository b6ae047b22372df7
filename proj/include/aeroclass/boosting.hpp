#pragma once

#include <aeroclass/tree.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace aeroclass {

inline double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// log(1 + exp(z)) without overflow.
inline double softplus(double z) noexcept { return std::max(z, 0.0) + std::log1p(std::exp(-std::fabs(z))); }

/// Mean logistic loss of margins against 0/1 targets.
inline double mean_logistic_loss(std::span<const double> margins, std::span<const double> targets) noexcept {
  double loss = 0.0;
  for (std::size_t i = 0; i < margins.size(); ++i) loss += softplus(margins[i]) - targets[i] * margins[i];
  return loss / static_cast<double>(margins.size());
}

struct BoostingParams {
  std::size_t rounds = 100;
  double learning_rate = 0.1;
  std::size_t max_depth = 3;
  double lambda = 1.0;
};

using RegressionTree = Tree<double>;

/// Newton gradient-boosted trees on the logistic loss. The margin starts at
/// the log-odds of the training prior; each round fits one tree to the
/// gradient/hessian statistics and adds its (already shrunken) leaf values.
class BoostedTrees {
public:
  /// Called after every round with the 1-based round number and the mean
  /// training logistic loss after that round.
  using RoundObserver = std::function<void(std::size_t round, double loss)>;

  BoostedTrees() = default;
  BoostedTrees(double base_margin, std::vector<RegressionTree> trees, std::size_t n_features)
      : base_margin_(base_margin), trees_(std::move(trees)), n_features_(n_features) {}

  static BoostedTrees fit(const Dataset& train, const BoostingParams& params, const RoundObserver& observer = {}) {
    if (params.learning_rate <= 0.0) throw ValidationError("xgb: learning rate must be positive");
    if (params.lambda < 0.0) throw ValidationError("xgb: lambda must be non-negative");
    const DenseMatrix x(train);
    const auto y = binary_targets(train);
    const std::size_t n = x.rows();

    const double prior = std::clamp(std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n), 1e-6, 1 - 1e-6);
    const double base = std::log(prior / (1.0 - prior));
    std::vector<double> margin(n, base), grad(n), hess(n);

    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::vector<std::size_t> every_feature(x.cols());
    std::iota(every_feature.begin(), every_feature.end(), std::size_t{0});
    auto pick = [&](std::vector<std::size_t>& out) { out = every_feature; };

    std::vector<RegressionTree> trees;
    trees.reserve(params.rounds);
    for (std::size_t round = 1; round <= params.rounds; ++round) {
      for (std::size_t i = 0; i < n; ++i) {
        const double p = sigmoid(margin[i]);
        grad[i] = p - y[i];
        hess[i] = std::max(p * (1.0 - p), 1e-16);
      }
      const NewtonCriterion criterion(grad, hess, params.lambda, params.learning_rate);
      TreeGrower<NewtonCriterion> grower(x, criterion, GrowOptions{params.max_depth, 2, 1e-12});
      trees.push_back(grower.grow(all, pick));
      for (std::size_t i = 0; i < n; ++i) margin[i] += trees.back().evaluate(x.row(i));
      if (observer) observer(round, mean_logistic_loss(margin, y));
    }
    return BoostedTrees(base, std::move(trees), x.cols());
  }

  double margin(std::span<const double> x) const noexcept {
    double m = base_margin_;
    for (const auto& t : trees_) m += t.evaluate(x);
    return m;
  }

  double score(std::span<const double> x) const noexcept { return sigmoid(margin(x)); }

  double base_margin() const noexcept { return base_margin_; }
  const std::vector<RegressionTree>& trees() const noexcept { return trees_; }
  std::size_t n_features() const noexcept { return n_features_; }

private:
  double base_margin_ = 0.0;
  std::vector<RegressionTree> trees_;
  std::size_t n_features_ = 0;
};

} // namespace aeroclass

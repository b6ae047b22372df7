#pragma once

#include <aeroclass/rng.hpp>
#include <aeroclass/tree.hpp>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace aeroclass {

struct ForestParams {
  std::size_t n_trees = 100;
  std::size_t max_depth = 8;
  bool bootstrap = true;
  std::size_t max_features = 0;  ///< features tried per split; 0 means ceil(sqrt(d))
};

inline std::size_t default_max_features(std::size_t dim) noexcept {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(dim)))));
}

using DecisionTree = Tree<ClassLeaf>;

namespace detail {

inline DecisionTree grow_classification_tree(const DenseMatrix& x, const GiniCriterion& criterion,
                                             const ForestParams& params, std::uint64_t seed) {
  SplitMix64 rng(seed);
  const std::size_t n = x.rows();
  const std::size_t dim = x.cols();
  const std::size_t m = std::min(dim, params.max_features == 0 ? default_max_features(dim) : params.max_features);

  std::vector<std::size_t> samples(n);
  if (params.bootstrap) {
    for (auto& s : samples) s = static_cast<std::size_t>(rng.uniform_below(n));
  } else {
    std::iota(samples.begin(), samples.end(), std::size_t{0});
  }

  std::vector<std::size_t> pool(dim);
  // Partial Fisher-Yates: the first m slots of the pool become the candidates.
  auto pick = [&](std::vector<std::size_t>& out) {
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < m; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.uniform_below(dim - i));
      std::swap(pool[i], pool[j]);
      out.push_back(pool[i]);
    }
  };

  TreeGrower<GiniCriterion> grower(x, criterion, GrowOptions{params.max_depth, 2, 1e-12});
  return grower.grow(std::move(samples), pick);
}

} // namespace detail

/// Single CART tree as grown inside a forest (same sampling rules).
inline DecisionTree fit_decision_tree(const Dataset& train, const ForestParams& params, std::uint64_t seed) {
  const DenseMatrix x(train);
  const auto y = binary_targets(train);
  const GiniCriterion criterion(y);
  return detail::grow_classification_tree(x, criterion, params, seed);
}

/// Random forest of Gini CART trees. Tree t is grown from
/// derive_seed(seed, t), so trees are independent of one another.
class RandomForest {
public:
  RandomForest() = default;
  RandomForest(std::vector<DecisionTree> trees, std::size_t n_features)
      : trees_(std::move(trees)), n_features_(n_features) {}

  static RandomForest fit(const Dataset& train, const ForestParams& params, std::uint64_t seed) {
    if (params.n_trees < 1) throw ValidationError("rfc: n_trees must be at least 1");
    const DenseMatrix x(train);
    const auto y = binary_targets(train);
    const GiniCriterion criterion(y);
    std::vector<DecisionTree> trees;
    trees.reserve(params.n_trees);
    for (std::size_t t = 0; t < params.n_trees; ++t)
      trees.push_back(detail::grow_classification_tree(x, criterion, params, derive_seed(seed, t)));
    return RandomForest(std::move(trees), x.cols());
  }

  std::size_t serious_votes(std::span<const double> x) const noexcept {
    std::size_t votes = 0;
    for (const auto& t : trees_) votes += t.evaluate(x).majority() == Label::SeriousIncident ? 1 : 0;
    return votes;
  }

  /// Fraction of trees voting SeriousIncident.
  double score(std::span<const double> x) const noexcept {
    return static_cast<double>(serious_votes(x)) / static_cast<double>(trees_.size());
  }

  const std::vector<DecisionTree>& trees() const noexcept { return trees_; }
  std::size_t n_features() const noexcept { return n_features_; }

private:
  std::vector<DecisionTree> trees_;
  std::size_t n_features_ = 0;
};

} // namespace aeroclass

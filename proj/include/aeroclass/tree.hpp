#pragma once

#include <aeroclass/dataset.hpp>
#include <aeroclass/error.hpp>

#include <algorithm>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace aeroclass {

/// Row-major copy of a dataset's feature vectors, built once per fit.
class DenseMatrix {
public:
  DenseMatrix() = default;

  explicit DenseMatrix(const Dataset& d) : rows_(d.size()), cols_(d.dim()) {
    values_.reserve(rows_ * cols_);
    for (const auto& r : d.records) {
      if (r.features.size() != cols_) throw ValidationError("dataset rows differ in length");
      values_.insert(values_.end(), r.features.begin(), r.features.end());
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return values_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const noexcept { return {values_.data() + r * cols_, cols_}; }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

inline std::vector<double> binary_targets(const Dataset& d) {
  std::vector<double> y(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) y[i] = d.records[i].label == Label::SeriousIncident ? 1.0 : 0.0;
  return y;
}

/// Binary tree stored as a flat node array in pre-order, root at index 0.
/// Internal nodes send x to `left` when x[feature] <= threshold.
template <typename Leaf>
struct Tree {
  struct Node {
    std::int32_t feature = -1;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    Leaf leaf{};

    bool is_leaf() const noexcept { return feature < 0; }
  };

  std::vector<Node> nodes;

  const Leaf& evaluate(std::span<const double> x) const noexcept {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
      const auto& n = nodes[i];
      i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return nodes[i].leaf;
  }

  std::size_t depth() const noexcept { return depth_from(0); }

private:
  std::size_t depth_from(std::size_t i) const noexcept {
    if (nodes[i].is_leaf()) return 0;
    return 1 + std::max(depth_from(static_cast<std::size_t>(nodes[i].left)),
                        depth_from(static_cast<std::size_t>(nodes[i].right)));
  }
};

/// Leaf payload of classification trees: training class counts reaching the leaf.
struct ClassLeaf {
  std::uint64_t incident = 0;
  std::uint64_t serious = 0;

  /// Majority label; ties go to Incident.
  Label majority() const noexcept { return serious > incident ? Label::SeriousIncident : Label::Incident; }

  friend bool operator==(const ClassLeaf&, const ClassLeaf&) = default;
};

/// 1 - sum of squared class proportions.
inline double gini_impurity(std::uint64_t n_incident, std::uint64_t n_serious) {
  const auto n = n_incident + n_serious;
  if (n == 0) throw ValidationError("gini_impurity: both counts are zero");
  const double pi = static_cast<double>(n_incident) / static_cast<double>(n);
  const double ps = static_cast<double>(n_serious) / static_cast<double>(n);
  return 1.0 - (pi * pi + ps * ps);
}

/// CART classification criterion. score(S) = sum_k c_k^2 / n, so that
/// score(L) + score(R) - score(P) equals n_P * gini(P) - n_L * gini(L) - n_R * gini(R).
class GiniCriterion {
public:
  struct Stats {
    double incident = 0.0;
    double serious = 0.0;

    Stats& operator+=(const Stats& o) noexcept { incident += o.incident; serious += o.serious; return *this; }
    Stats& operator-=(const Stats& o) noexcept { incident -= o.incident; serious -= o.serious; return *this; }
  };
  using Leaf = ClassLeaf;

  explicit GiniCriterion(std::span<const double> targets) : targets_(targets) {}

  Stats of(std::size_t sample) const noexcept {
    return targets_[sample] > 0.5 ? Stats{0.0, 1.0} : Stats{1.0, 0.0};
  }
  double score(const Stats& s) const noexcept {
    const double n = s.incident + s.serious;
    return n > 0.0 ? (s.incident * s.incident + s.serious * s.serious) / n : 0.0;
  }
  bool is_pure(const Stats& s) const noexcept { return s.incident == 0.0 || s.serious == 0.0; }
  Leaf leaf(const Stats& s) const noexcept {
    return {static_cast<std::uint64_t>(s.incident + 0.5), static_cast<std::uint64_t>(s.serious + 0.5)};
  }

private:
  std::span<const double> targets_;
};

/// Second-order boosting criterion: score(S) = G^2 / (H + lambda); leaves
/// hold the shrunken Newton step -eta * G / (H + lambda).
class NewtonCriterion {
public:
  struct Stats {
    double g = 0.0;
    double h = 0.0;

    Stats& operator+=(const Stats& o) noexcept { g += o.g; h += o.h; return *this; }
    Stats& operator-=(const Stats& o) noexcept { g -= o.g; h -= o.h; return *this; }
  };
  using Leaf = double;

  NewtonCriterion(std::span<const double> grad, std::span<const double> hess, double lambda, double eta)
      : grad_(grad), hess_(hess), lambda_(lambda), eta_(eta) {}

  Stats of(std::size_t sample) const noexcept { return {grad_[sample], hess_[sample]}; }
  double score(const Stats& s) const noexcept { return s.g * s.g / (s.h + lambda_); }
  bool is_pure(const Stats&) const noexcept { return false; }
  Leaf leaf(const Stats& s) const noexcept { return -eta_ * s.g / (s.h + lambda_); }

private:
  std::span<const double> grad_;
  std::span<const double> hess_;
  double lambda_;
  double eta_;
};

struct GrowOptions {
  std::size_t max_depth = 8;
  std::size_t min_samples_split = 2;
  double min_gain = 1e-12;
};

/// Greedy depth-first tree induction. Candidate thresholds are midpoints
/// between consecutive distinct values of a feature within the node. The
/// first best split found wins, scanning features in the order the picker
/// returns them. `samples` may contain repeats (bootstrap draws).
template <typename Criterion>
class TreeGrower {
public:
  using Stats = typename Criterion::Stats;
  using Leaf = typename Criterion::Leaf;

  TreeGrower(const DenseMatrix& x, const Criterion& criterion, GrowOptions options)
      : x_(x), criterion_(criterion), options_(options) {}

  /// `pick` is called once per splittable node as pick(std::vector<std::size_t>& features).
  template <typename FeaturePicker>
  Tree<Leaf> grow(std::vector<std::size_t> samples, FeaturePicker&& pick) {
    Tree<Leaf> tree;
    build(tree, samples, 0, pick);
    return tree;
  }

private:
  struct Split {
    std::size_t feature = 0;
    double threshold = 0.0;
    double gain = 0.0;
    bool found = false;
  };

  template <typename FeaturePicker>
  std::int32_t build(Tree<Leaf>& tree, std::vector<std::size_t>& samples, std::size_t depth, FeaturePicker& pick) {
    Stats total{};
    for (auto s : samples) total += criterion_.of(s);

    const auto id = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.back().leaf = criterion_.leaf(total);

    if (depth >= options_.max_depth || samples.size() < options_.min_samples_split || criterion_.is_pure(total))
      return id;

    features_.clear();
    pick(features_);
    const Split split = best_split(samples, total);
    if (!split.found) return id;

    std::vector<std::size_t> left, right;
    left.reserve(samples.size());
    right.reserve(samples.size());
    for (auto s : samples) (x_(s, split.feature) <= split.threshold ? left : right).push_back(s);
    samples.clear();
    samples.shrink_to_fit();

    const auto l = build(tree, left, depth + 1, pick);
    const auto r = build(tree, right, depth + 1, pick);
    auto& node = tree.nodes[static_cast<std::size_t>(id)];
    node.feature = static_cast<std::int32_t>(split.feature);
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  // Orders the node's samples by feature f into sorted_. Exact 0s and 1s
  // (the bulk of occurrence data) are bucketed; only other values are sorted.
  void sort_by_feature(const std::vector<std::size_t>& samples, std::size_t f) {
    zeros_.clear();
    ones_.clear();
    others_.clear();
    for (auto s : samples) {
      const double v = x_(s, f);
      if (v == 0.0) zeros_.push_back(s);
      else if (v == 1.0) ones_.push_back(s);
      else others_.emplace_back(v, s);
    }
    std::sort(others_.begin(), others_.end());
    sorted_.clear();
    auto o = others_.begin();
    for (; o != others_.end() && o->first < 0.0; ++o) sorted_.push_back(*o);
    for (auto s : zeros_) sorted_.emplace_back(0.0, s);
    for (; o != others_.end() && o->first < 1.0; ++o) sorted_.push_back(*o);
    for (auto s : ones_) sorted_.emplace_back(1.0, s);
    for (; o != others_.end(); ++o) sorted_.push_back(*o);
  }

  Split best_split(const std::vector<std::size_t>& samples, const Stats& total) {
    Split best;
    const double parent = criterion_.score(total);
    for (auto f : features_) {
      sort_by_feature(samples, f);
      if (sorted_.front().first == sorted_.back().first) continue;
      Stats left{};
      for (std::size_t i = 0; i + 1 < sorted_.size(); ++i) {
        left += criterion_.of(sorted_[i].second);
        const double lo = sorted_[i].first;
        const double hi = sorted_[i + 1].first;
        if (lo == hi) continue;
        Stats right = total;
        right -= left;
        const double gain = criterion_.score(left) + criterion_.score(right) - parent;
        if (gain > options_.min_gain && (!best.found || gain > best.gain)) {
          double threshold = lo + 0.5 * (hi - lo);
          if (!(threshold < hi)) threshold = lo;
          best = {f, threshold, gain, true};
        }
      }
    }
    return best;
  }

  const DenseMatrix& x_;
  const Criterion& criterion_;
  GrowOptions options_;
  std::vector<std::size_t> features_;
  std::vector<std::pair<double, std::size_t>> sorted_;
  std::vector<std::pair<double, std::size_t>> others_;
  std::vector<std::size_t> zeros_;
  std::vector<std::size_t> ones_;
};

} // namespace aeroclass

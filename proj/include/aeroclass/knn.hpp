#pragma once

#include <aeroclass/dataset.hpp>
#include <aeroclass/smote.hpp>

#include <algorithm>
#include <vector>

namespace aeroclass {

struct KnnParams {
  std::size_t k = 5;
};

/// k-nearest-neighbour vote over the stored training set. Distances are
/// Euclidean with ties going to the lower training index; k is capped at the
/// training size. Tolerates single-class training data.
class KnnModel {
public:
  KnnModel() = default;
  KnnModel(std::size_t k, std::vector<FeatureVector> points, std::vector<Label> labels)
      : k_(k), points_(std::move(points)), labels_(std::move(labels)) {
    if (k_ < 1) throw ValidationError("knn: k must be at least 1");
    if (points_.empty() || points_.size() != labels_.size()) throw ValidationError("knn: empty or ragged training set");
  }

  static KnnModel fit(const Dataset& train, const KnnParams& params) {
    std::vector<FeatureVector> points;
    std::vector<Label> labels;
    points.reserve(train.size());
    labels.reserve(train.size());
    for (const auto& r : train.records) {
      points.push_back(r.features);
      labels.push_back(r.label);
    }
    return KnnModel(params.k, std::move(points), std::move(labels));
  }

  std::size_t effective_k() const noexcept { return std::min(k_, points_.size()); }

  std::vector<std::size_t> neighbours(std::span<const double> x) const {
    return k_nearest(x, points_, effective_k());
  }

  /// Fraction of the k neighbours labelled SeriousIncident.
  double score(std::span<const double> x) const {
    const auto nb = neighbours(x);
    std::size_t serious = 0;
    for (auto i : nb) serious += labels_[i] == Label::SeriousIncident ? 1 : 0;
    return static_cast<double>(serious) / static_cast<double>(nb.size());
  }

  std::size_t k() const noexcept { return k_; }
  const std::vector<FeatureVector>& points() const noexcept { return points_; }
  const std::vector<Label>& labels() const noexcept { return labels_; }
  std::size_t n_features() const noexcept { return points_.empty() ? 0 : points_.front().size(); }

private:
  std::size_t k_ = 5;
  std::vector<FeatureVector> points_;
  std::vector<Label> labels_;
};

} // namespace aeroclass

#pragma once

#include <aeroclass/dataset.hpp>
#include <aeroclass/error.hpp>
#include <aeroclass/rng.hpp>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace aeroclass {

struct SmoteConfig {
  std::size_t k = 5;
  std::uint64_t seed = 0;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

namespace detail {

inline std::vector<std::size_t> k_smallest(std::vector<std::pair<double, std::size_t>>& scored, std::size_t k) {
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end());
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = scored[i].second;
  return out;
}

} // namespace detail

/// Indices of the k candidates closest to `x` (Euclidean), nearest first,
/// equal distances ordered by lower index. `exclude` removes one candidate,
/// typically x's own position in the list.
inline std::vector<std::size_t> k_nearest(std::span<const double> x, std::span<const FeatureVector> candidates,
                                          std::size_t k, std::optional<std::size_t> exclude = std::nullopt) {
  const std::size_t available = candidates.size() - (exclude && *exclude < candidates.size() ? 1 : 0);
  if (k < 1 || k > available)
    throw ValidationError("k_nearest: k=" + std::to_string(k) + " out of range for " + std::to_string(available) +
                          " candidates");
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (exclude && i == *exclude) continue;
    scored.emplace_back(squared_distance(x, candidates[i]), i);
  }
  return detail::k_smallest(scored, k);
}

/// Neighbours of minority[self] among the other minority vectors.
inline std::vector<std::size_t> k_nearest_minority(std::span<const FeatureVector> minority, std::size_t self,
                                                   std::size_t k) {
  if (minority.size() < k + 1)
    throw ValidationError("k_nearest_minority: need at least k+1=" + std::to_string(k + 1) + " minority records, have " +
                          std::to_string(minority.size()));
  return k_nearest(minority[self], minority, k, self);
}

/// Synthetic minority over-sampling to class parity.
///
/// Appends majority - minority synthetic records after the untouched
/// originals. Parents cycle through the minority records in a seeded shuffled
/// order; each synthetic takes one of the parent's k nearest minority
/// neighbours uniformly at random and a single gap g in [0, 1) shared by all
/// coordinates: s = x + g * (n - x). Synthetic ids are "synthetic:<i>".
inline Dataset smote(const Dataset& train, const SmoteConfig& cfg) {
  if (cfg.k < 1) throw ValidationError("smote: k must be at least 1");
  const auto counts = class_counts(train);
  if (counts.incident == 0 || counts.serious == 0) throw ValidationError("smote: both classes must be present");
  if (counts.incident == counts.serious) return train;

  const Label minority_label = counts.serious < counts.incident ? Label::SeriousIncident : Label::Incident;
  std::vector<FeatureVector> minority;
  for (const auto& r : train.records)
    if (r.label == minority_label) minority.push_back(r.features);
  if (minority.size() <= cfg.k)
    throw ValidationError("smote: minority count " + std::to_string(minority.size()) + " must exceed k=" +
                          std::to_string(cfg.k));

  std::vector<std::vector<std::size_t>> neighbours(minority.size());
  for (std::size_t i = 0; i < minority.size(); ++i) neighbours[i] = k_nearest_minority(minority, i, cfg.k);

  SplitMix64 rng(cfg.seed);
  std::vector<std::size_t> order(minority.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span(order));

  const std::size_t n_synthetic = std::max(counts.incident, counts.serious) - minority.size();
  Dataset out = train;
  out.records.reserve(train.size() + n_synthetic);
  for (std::size_t s = 0; s < n_synthetic; ++s) {
    const std::size_t parent = order[s % order.size()];
    const auto& nbrs = neighbours[parent];
    const std::size_t nb = nbrs[static_cast<std::size_t>(rng.uniform_below(nbrs.size()))];
    const double gap = rng.uniform01();
    const auto& x = minority[parent];
    const auto& n = minority[nb];
    LabeledRecord rec;
    rec.features.resize(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) rec.features[j] = x[j] + gap * (n[j] - x[j]);
    rec.label = minority_label;
    rec.record_id = "synthetic:" + std::to_string(s);
    out.records.push_back(std::move(rec));
  }
  return out;
}

} // namespace aeroclass

#pragma once

#include <aeroclass/model.hpp>

#include <array>
#include <numeric>
#include <vector>

namespace aeroclass {

/// Stratified fold assignment: each class is shuffled separately (incident
/// first) and dealt round-robin, so fold f receives positions f, f+k, ...
/// Returns the record indices of each fold in ascending order.
inline std::vector<std::vector<std::size_t>> stratified_folds(const Dataset& d, std::size_t n_folds,
                                                              std::uint64_t seed) {
  std::vector<std::size_t> incident, serious;
  for (std::size_t i = 0; i < d.size(); ++i)
    (d.records[i].label == Label::SeriousIncident ? serious : incident).push_back(i);
  if (n_folds < 2 || incident.size() < n_folds || serious.size() < n_folds)
    throw ValidationError("tune: too few records for " + std::to_string(n_folds) + "-fold cross-validation (incident " +
                          std::to_string(incident.size()) + ", serious_incident " + std::to_string(serious.size()) +
                          ")");
  SplitMix64 rng(seed);
  std::vector<std::vector<std::size_t>> folds(n_folds);
  for (auto* cls : {&incident, &serious}) {
    rng.shuffle(std::span(*cls));
    for (std::size_t i = 0; i < cls->size(); ++i) folds[i % n_folds].push_back((*cls)[i]);
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

struct CvScore {
  double accuracy = 0.0;
  double mcc = 0.0;
};

/// Mean held-out accuracy and MCC over the given folds. The model for fold f
/// is fit with derive_seed(seed, f).
inline CvScore cross_validate(Family family, const Hyperparams& hp, const Dataset& d,
                              const std::vector<std::vector<std::size_t>>& folds, std::uint64_t seed) {
  CvScore s;
  std::vector<std::size_t> fold_of(d.size(), 0);
  for (std::size_t f = 0; f < folds.size(); ++f)
    for (auto i : folds[f]) fold_of[i] = f;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    Dataset train, held_out;
    train.schema_version = held_out.schema_version = d.schema_version;
    for (std::size_t i = 0; i < d.size(); ++i) (fold_of[i] == f ? held_out : train).records.push_back(d.records[i]);
    const auto model = fit(family, hp, train, derive_seed(seed, f));
    const auto cm = evaluate_model(model, held_out);
    s.accuracy += accuracy(cm);
    s.mcc += mcc(cm);
  }
  s.accuracy /= static_cast<double>(folds.size());
  s.mcc /= static_cast<double>(folds.size());
  return s;
}

struct TuneResult {
  Hyperparams best;
  CvScore best_score;
  std::vector<std::pair<Hyperparams, CvScore>> evaluated;  ///< in grid order
};

inline constexpr std::size_t kTuningFolds = 3;

/// Exhaustive grid search with stratified 3-fold CV. Picks the highest mean
/// accuracy, then the higher mean MCC, then the earlier grid point. The same
/// folds are used for every grid point.
inline TuneResult tune_detailed(const ModelSpec& spec, const Dataset& train, std::uint64_t seed) {
  const auto points = spec.grid_points();
  if (points.empty()) throw ValidationError("tune: empty grid");
  TuneResult result;
  if (points.size() == 1) {
    result.best = points.front();
    return result;
  }
  const auto folds = stratified_folds(train, kTuningFolds, seed);
  bool have = false;
  for (const auto& hp : points) {
    const auto score = cross_validate(spec.family, hp, train, folds, seed);
    result.evaluated.emplace_back(hp, score);
    if (!have || score.accuracy > result.best_score.accuracy ||
        (score.accuracy == result.best_score.accuracy && score.mcc > result.best_score.mcc)) {
      result.best = hp;
      result.best_score = score;
      have = true;
    }
  }
  return result;
}

inline Hyperparams tune(const ModelSpec& spec, const Dataset& train, std::uint64_t seed) {
  return tune_detailed(spec, train, seed).best;
}

} // namespace aeroclass

#pragma once

#include <aeroclass/dataset.hpp>
#include <aeroclass/error.hpp>
#include <aeroclass/rng.hpp>
#include <aeroclass/schema.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string_view>
#include <utility>
#include <vector>

namespace aeroclass {

/// Stand-in labelling rule for desk-scale experiments: an occurrence is a
/// serious incident when the weighted sum of twelve severity features
/// exceeds the threshold. Every feature is present independently with
/// probability `feature_rate` before rejection sampling.
struct PlantedRule {
  static constexpr std::array<std::pair<std::string_view, double>, 12> weights{{
      {"excursion", 3.0},
      {"runway_overrun", 3.0},
      {"loss_of_control_inflight", 2.5},
      {"engine_fire", 2.5},
      {"tcas_resolution_advisory", 2.0},
      {"loss_of_separation", 2.0},
      {"injuries", 1.5},
      {"incapacitation", 1.5},
      {"damage_minor_repair", 1.0},
      {"egpws", 1.0},
      {"minimum_safe_altitude_breached", 1.0},
      {"part_came_off", 1.0},
  }};
  static constexpr double threshold = 3.75;
  static constexpr double feature_rate = 0.15;

  static double severity(const FeatureSchema& schema, std::span<const double> x) {
    double s = 0.0;
    for (const auto& [id, w] : weights) s += w * x[*schema.index_of(id)];
    return s;
  }

  static Label label(const FeatureSchema& schema, std::span<const double> x) {
    return severity(schema, x) > threshold ? Label::SeriousIncident : Label::Incident;
  }
};

struct SyntheticParams {
  std::size_t n = 475;
  double imbalance = 0.6;  ///< target fraction of incident records
  double noise = 0.15;     ///< label flip rate
  std::uint64_t seed = 0;
};

/// Planted-rule dataset over `schema`.
///
/// Rule-positive and rule-negative records are drawn by rejection sampling
/// in counts chosen so that, after flipping round(noise * count) labels
/// within each rule class, the incident fraction is `imbalance` up to
/// rounding. Records are shuffled and named event-0001, event-0002, ...
inline Dataset generate_synthetic_dataset(const SyntheticParams& p, const FeatureSchema& schema = canonical_schema()) {
  if (p.n < 2) throw ValidationError("synthetic: n must be at least 2");
  if (!(p.imbalance > 0.0 && p.imbalance < 1.0)) throw ValidationError("synthetic: imbalance must lie in (0, 1)");
  if (!(p.noise >= 0.0 && p.noise < 0.5)) throw ValidationError("synthetic: noise must lie in [0, 0.5)");
  for (const auto& [id, w] : PlantedRule::weights)
    if (!schema.index_of(id)) throw ValidationError("synthetic: schema lacks severity feature '" + std::string(id) + "'");

  const double serious_fraction = 1.0 - p.imbalance;
  const double rule_fraction = std::clamp((serious_fraction - p.noise) / (1.0 - 2.0 * p.noise), 0.0, 1.0);
  const auto n_rule_serious = static_cast<std::size_t>(std::lround(rule_fraction * static_cast<double>(p.n)));
  const std::size_t n_rule_incident = p.n - n_rule_serious;

  SplitMix64 rng(p.seed);
  std::vector<LabeledRecord> serious, incident;
  const std::size_t max_draws = 10000 * p.n;
  for (std::size_t draw = 0; serious.size() < n_rule_serious || incident.size() < n_rule_incident; ++draw) {
    if (draw >= max_draws) throw Error("synthetic: rejection sampling did not converge");
    LabeledRecord r;
    r.features.resize(schema.size());
    for (auto& v : r.features) v = rng.uniform01() < PlantedRule::feature_rate ? 1.0 : 0.0;
    r.label = PlantedRule::label(schema, r.features);
    auto& bucket = r.label == Label::SeriousIncident ? serious : incident;
    const auto cap = r.label == Label::SeriousIncident ? n_rule_serious : n_rule_incident;
    if (bucket.size() < cap) bucket.push_back(std::move(r));
  }

  auto flip = [&](std::vector<LabeledRecord>& group) {
    std::vector<std::size_t> idx(group.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    rng.shuffle(std::span(idx));
    const auto n_flip = static_cast<std::size_t>(std::lround(p.noise * static_cast<double>(group.size())));
    for (std::size_t i = 0; i < n_flip; ++i) {
      auto& l = group[idx[i]].label;
      l = l == Label::SeriousIncident ? Label::Incident : Label::SeriousIncident;
    }
  };
  flip(serious);
  flip(incident);

  Dataset d;
  d.schema_version = schema.version();
  d.records = std::move(incident);
  d.records.insert(d.records.end(), std::make_move_iterator(serious.begin()), std::make_move_iterator(serious.end()));
  rng.shuffle(std::span(d.records));
  char name[32];
  for (std::size_t i = 0; i < d.size(); ++i) {
    std::snprintf(name, sizeof name, "event-%04zu", i + 1);
    d.records[i].record_id = name;
  }
  return d;
}

} // namespace aeroclass

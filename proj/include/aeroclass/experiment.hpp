#pragma once

#include <aeroclass/dataset.hpp>
#include <aeroclass/metrics.hpp>
#include <aeroclass/model.hpp>
#include <aeroclass/smote.hpp>
#include <aeroclass/synthetic.hpp>
#include <aeroclass/tuning.hpp>

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace aeroclass {

/// A dataset variant of the benchmark. smote_k == 0 means the training split
/// is used as is; otherwise it is rebalanced with SMOTE using k neighbours.
struct VariantSpec {
  std::string name;
  std::size_t smote_k = 0;

  friend bool operator==(const VariantSpec&, const VariantSpec&) = default;
};

/// "original" or "smote_k<k>".
inline VariantSpec parse_variant(std::string_view name) {
  if (name == "original") return {"original", 0};
  if (name.starts_with("smote_k")) {
    std::size_t k = 0;
    const auto digits = name.substr(7);
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec == std::errc{} && ptr == digits.data() + digits.size() && k >= 1 && !digits.empty())
      return {std::string(name), k};
  }
  throw ValidationError("unknown variant '" + std::string(name) + "' (expected original | smote_k<k>)");
}

struct ExperimentConfig {
  std::size_t n_runs = 100;
  double ratio = 0.8;
  std::uint64_t base_seed = 1;
  std::vector<Family> families{kAllFamilies.begin(), kAllFamilies.end()};
  /// The first variant is the baseline every other variant is tested against.
  std::vector<VariantSpec> variants{{"original", 0}, {"smote_k1", 1}, {"smote_k5", 5}};
  std::string dataset;                       ///< CSV path; empty when `synthetic` is set
  std::optional<SyntheticParams> synthetic;  ///< generate the dataset instead of loading it
  double alpha = 0.005;
  bool stratified = true;
  bool paired = false;  ///< paired t-test instead of Welch
  std::size_t threads = 1;  ///< worker threads; does not affect results

  void validate() const {
    if (n_runs < 2) throw ValidationError("config: n_runs must be at least 2");
    if (!(ratio > 0.0 && ratio < 1.0)) throw ValidationError("config: ratio must lie in (0, 1)");
    if (families.empty()) throw ValidationError("config: no model families");
    if (variants.empty()) throw ValidationError("config: no dataset variants");
    for (std::size_t i = 0; i < variants.size(); ++i)
      for (std::size_t j = i + 1; j < variants.size(); ++j)
        if (variants[i].name == variants[j].name)
          throw ValidationError("config: duplicate variant name '" + variants[i].name + "'");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("config: alpha must lie in (0, 1)");
    if (dataset.empty() && !synthetic) throw ValidationError("config: either 'dataset' or 'synthetic' is required");
  }
};

// Config file (JSON). Every field is optional except the data source:
// {
//   "n_runs": 100, "ratio": 0.8, "base_seed": 1,
//   "families": ["rfc", "xgb", "logr", "svm", "knn"],
//   "variants": ["original", "smote_k1", "smote_k5" | {"name": "...", "smote_k": k}],
//   "dataset": "path/to/data.csv"   or
//   "synthetic": {"n": 475, "imbalance": 0.6, "noise": 0.15, "seed": 7},
//   "alpha": 0.005, "stratified": true, "paired": false, "threads": 1
// }

inline nlohmann::ordered_json config_to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["n_runs"] = c.n_runs;
  j["ratio"] = c.ratio;
  j["base_seed"] = c.base_seed;
  j["families"] = nlohmann::ordered_json::array();
  for (auto f : c.families) j["families"].push_back(to_string(f));
  j["variants"] = nlohmann::ordered_json::array();
  for (const auto& v : c.variants) j["variants"].push_back({{"name", v.name}, {"smote_k", v.smote_k}});
  if (c.synthetic) {
    j["synthetic"] = {{"n", c.synthetic->n},
                      {"imbalance", c.synthetic->imbalance},
                      {"noise", c.synthetic->noise},
                      {"seed", c.synthetic->seed}};
  } else {
    j["dataset"] = c.dataset;
  }
  j["alpha"] = c.alpha;
  j["stratified"] = c.stratified;
  j["paired"] = c.paired;
  return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    if (!j.is_object()) throw ValidationError("config: top level must be an object");
    static const std::vector<std::string> known{"n_runs", "ratio",  "base_seed",  "families", "variants", "dataset",
                                                "synthetic", "alpha", "stratified", "paired", "threads"};
    for (const auto& [k, v] : j.items())
      if (std::find(known.begin(), known.end(), k) == known.end())
        throw ValidationError("config: unknown field '" + k + "'");
    if (j.contains("n_runs")) c.n_runs = j["n_runs"].get<std::size_t>();
    if (j.contains("ratio")) c.ratio = j["ratio"].get<double>();
    if (j.contains("base_seed")) c.base_seed = j["base_seed"].get<std::uint64_t>();
    if (j.contains("families")) {
      c.families.clear();
      for (const auto& f : j["families"]) c.families.push_back(parse_family(f.get<std::string>()));
    }
    if (j.contains("variants")) {
      c.variants.clear();
      for (const auto& v : j["variants"]) {
        if (v.is_string()) c.variants.push_back(parse_variant(v.get<std::string>()));
        else c.variants.push_back({v.at("name").get<std::string>(), v.value("smote_k", std::size_t{0})});
      }
    }
    if (j.contains("dataset")) c.dataset = j["dataset"].get<std::string>();
    if (j.contains("synthetic")) {
      const auto& s = j["synthetic"];
      SyntheticParams p;
      p.n = s.value("n", p.n);
      p.imbalance = s.value("imbalance", p.imbalance);
      p.noise = s.value("noise", p.noise);
      p.seed = s.value("seed", p.seed);
      c.synthetic = p;
    }
    if (j.contains("alpha")) c.alpha = j["alpha"].get<double>();
    if (j.contains("stratified")) c.stratified = j["stratified"].get<bool>();
    if (j.contains("paired")) c.paired = j["paired"].get<bool>();
    if (j.contains("threads")) c.threads = j["threads"].get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return c;
}

// ---------------------------------------------------------------------------
// Report

enum class Metric : std::uint8_t { Accuracy, F1, MCC };
inline constexpr std::array<Metric, 3> kAllMetrics{Metric::Accuracy, Metric::F1, Metric::MCC};

inline std::string_view to_string(Metric m) noexcept {
  switch (m) {
  case Metric::Accuracy: return "accuracy";
  case Metric::F1: return "f1";
  case Metric::MCC: return "mcc";
  }
  return "?";
}

inline double metric_of(const MetricSample& s, Metric m) noexcept {
  switch (m) {
  case Metric::Accuracy: return s.accuracy;
  case Metric::F1: return s.f1;
  case Metric::MCC: return s.mcc;
  }
  return 0.0;
}

/// Results of one (family, variant) pair across all runs.
struct CellResult {
  Family family = Family::RFC;
  VariantSpec variant;
  bool baseline = false;
  std::vector<MetricSample> samples;    ///< one per run, in run order
  std::vector<Hyperparams> tuned;       ///< hyperparameters chosen in each run
  MetricSample average;
  /// Against the same family's baseline variant, per metric. Empty for the
  /// baseline itself, or when both samples have zero variance.
  std::array<std::optional<TTestResult>, 3> tests;
};

struct DatasetSummary {
  std::size_t records = 0;
  ClassCounts counts;
  std::string schema_version;
};

struct BenchmarkReport {
  ExperimentConfig config;
  DatasetSummary dataset;
  std::vector<std::uint64_t> run_seeds;
  std::vector<CellResult> cells;  ///< family-major, variants in config order
  /// Fingerprint of each run's test split (in memory only, not serialized).
  std::vector<std::uint64_t> test_fingerprints;

  const CellResult* find(Family f, std::string_view variant) const {
    for (const auto& c : cells)
      if (c.family == f && c.variant.name == variant) return &c;
    return nullptr;
  }
};

inline MetricSample mean_of(std::span<const MetricSample> samples) noexcept {
  MetricSample m;
  for (const auto& s : samples) {
    m.accuracy += s.accuracy;
    m.f1 += s.f1;
    m.mcc += s.mcc;
  }
  const double n = static_cast<double>(samples.size());
  return {m.accuracy / n, m.f1 / n, m.mcc / n};
}

namespace detail {

// Stage-specific seed streams. None depends on the variant name, so two
// variants with the same smote_k produce identical samples.
inline std::uint64_t smote_seed(std::uint64_t run_seed, std::size_t k) { return derive_seed(run_seed, 1000 + k); }
inline std::uint64_t tune_seed(std::uint64_t run_seed, Family f) {
  return derive_seed(run_seed, 2000 + static_cast<std::uint64_t>(f));
}
inline std::uint64_t fit_seed(std::uint64_t run_seed, Family f) {
  return derive_seed(run_seed, 3000 + static_cast<std::uint64_t>(f));
}

inline std::uint64_t fingerprint(const Dataset& d) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& r : d.records) {
    feed(r.record_id.data(), r.record_id.size());
    feed(r.features.data(), r.features.size() * sizeof(double));
    feed(&r.label, sizeof r.label);
  }
  return h;
}

struct RunOutcome {
  // [family index][variant index]
  std::vector<std::vector<MetricSample>> samples;
  std::vector<std::vector<Hyperparams>> tuned;
  std::uint64_t test_fingerprint = 0;
};

inline RunOutcome run_once(const ExperimentConfig& cfg, const Dataset& data, std::size_t run) {
  const std::uint64_t seed = cfg.base_seed + run;
  std::string stage = "split";
  try {
    const auto split = stratified_split(data, cfg.ratio, seed, cfg.stratified);
    const auto test_print = fingerprint(split.test);
    RunOutcome out;
    out.test_fingerprint = test_print;
    out.samples.assign(cfg.families.size(), std::vector<MetricSample>(cfg.variants.size()));
    out.tuned.assign(cfg.families.size(), std::vector<Hyperparams>(cfg.variants.size()));
    for (std::size_t v = 0; v < cfg.variants.size(); ++v) {
      const auto& variant = cfg.variants[v];
      stage = "smote (" + variant.name + ")";
      const Dataset train =
          variant.smote_k == 0 ? split.train : smote(split.train, {variant.smote_k, smote_seed(seed, variant.smote_k)});
      for (std::size_t f = 0; f < cfg.families.size(); ++f) {
        const auto family = cfg.families[f];
        stage = "tune (" + std::string(to_string(family)) + ", " + variant.name + ")";
        const auto hp = tune(default_spec(family), train, tune_seed(seed, family));
        stage = "fit (" + std::string(to_string(family)) + ", " + variant.name + ")";
        const auto model = fit(family, hp, train, fit_seed(seed, family));
        stage = "evaluate (" + std::string(to_string(family)) + ", " + variant.name + ")";
        if (fingerprint(split.test) != test_print) throw Error("test split changed between variants");
        out.samples[f][v] = evaluate(evaluate_model(model, split.test));
        out.tuned[f][v] = model.hyperparams;
      }
    }
    return out;
  } catch (const std::exception& e) {
    throw Error("run " + std::to_string(run) + " (seed " + std::to_string(seed) + "), stage " + stage + ": " +
                e.what());
  }
}

} // namespace detail

inline std::optional<TTestResult> compare_samples(std::span<const double> variant, std::span<const double> baseline,
                                                  bool paired) {
  try {
    return paired ? paired_t_test(variant, baseline) : welch_t_test(variant, baseline);
  } catch (const ValidationError&) {
    return std::nullopt;
  }
}

/// Fills averages and significance tests from the stored samples.
inline void summarize(BenchmarkReport& report) {
  for (auto& cell : report.cells) {
    cell.average = mean_of(cell.samples);
    cell.tests = {};
  }
  for (auto& cell : report.cells) {
    if (cell.baseline) continue;
    const auto* base = report.find(cell.family, report.config.variants.front().name);
    if (!base) continue;
    for (std::size_t m = 0; m < kAllMetrics.size(); ++m) {
      std::vector<double> a, b;
      for (const auto& s : cell.samples) a.push_back(metric_of(s, kAllMetrics[m]));
      for (const auto& s : base->samples) b.push_back(metric_of(s, kAllMetrics[m]));
      cell.tests[m] = compare_samples(a, b, report.config.paired);
    }
  }
}

using ProgressCallback = std::function<void(std::size_t completed_runs, std::size_t total_runs)>;

/// Runs the benchmark protocol on `data`.
///
/// Run r uses seed base_seed + r: one split shared by every variant and
/// family, SMOTE on the training side only, per-run grid-search tuning, a
/// fit with the tuned hyperparameters, and evaluation on the untouched test
/// side. Runs execute on `config.threads` workers; the report is assembled
/// in run order and does not depend on the thread count.
inline BenchmarkReport run_benchmark(const ExperimentConfig& config, const Dataset& data,
                                     const ProgressCallback& progress = {}) {
  config.validate();
  if (data.empty()) throw ValidationError("benchmark: empty dataset");

  std::vector<std::optional<detail::RunOutcome>> outcomes(config.n_runs);
  std::atomic<std::size_t> next{0};
  std::size_t completed = 0;
  std::mutex mu;
  std::exception_ptr failure;
  std::size_t failed_run = SIZE_MAX;

  auto worker = [&] {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= config.n_runs) return;
      {
        std::lock_guard lock(mu);
        if (failure && r > failed_run) return;
      }
      try {
        auto outcome = detail::run_once(config, data, r);
        std::lock_guard lock(mu);
        outcomes[r] = std::move(outcome);
        ++completed;
        if (progress) progress(completed, config.n_runs);
      } catch (...) {
        std::lock_guard lock(mu);
        // Report the lowest failing run so the error is deterministic.
        if (r < failed_run) {
          failed_run = r;
          failure = std::current_exception();
        }
      }
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(config.threads, 1, config.n_runs);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  BenchmarkReport report;
  report.config = config;
  report.dataset = {data.size(), class_counts(data), data.schema_version};
  for (std::size_t r = 0; r < config.n_runs; ++r) {
    report.run_seeds.push_back(config.base_seed + r);
    report.test_fingerprints.push_back(outcomes[r]->test_fingerprint);
  }
  for (std::size_t f = 0; f < config.families.size(); ++f) {
    for (std::size_t v = 0; v < config.variants.size(); ++v) {
      CellResult cell;
      cell.family = config.families[f];
      cell.variant = config.variants[v];
      cell.baseline = v == 0;
      for (const auto& o : outcomes) {
        cell.samples.push_back(o->samples[f][v]);
        cell.tuned.push_back(o->tuned[f][v]);
      }
      report.cells.push_back(std::move(cell));
    }
  }
  summarize(report);
  return report;
}

/// Loads or generates the dataset named by the config.
inline Dataset load_experiment_dataset(const ExperimentConfig& config, const FeatureSchema& schema) {
  if (config.synthetic) return generate_synthetic_dataset(*config.synthetic, schema);
  std::ifstream in(config.dataset);
  if (!in) throw Error("cannot open dataset '" + config.dataset + "'");
  return load_dataset(in, schema);
}

// ---------------------------------------------------------------------------
// Emitters

inline constexpr int kReportFormatVersion = 1;

/// Machine format: JSON with every sample at full precision.
inline nlohmann::ordered_json report_to_json(const BenchmarkReport& report) {
  using ojson = nlohmann::ordered_json;
  auto sample_json = [](const MetricSample& s) {
    return ojson{{"accuracy", s.accuracy}, {"f1", s.f1}, {"mcc", s.mcc}};
  };
  ojson j;
  j["format_version"] = kReportFormatVersion;
  j["config"] = config_to_json(report.config);
  j["dataset"] = {{"records", report.dataset.records},
                  {"incident", report.dataset.counts.incident},
                  {"serious_incident", report.dataset.counts.serious},
                  {"schema_version", report.dataset.schema_version}};
  j["run_seeds"] = report.run_seeds;
  auto& results = j["results"] = ojson::array();
  for (const auto& c : report.cells) {
    ojson cell;
    cell["family"] = to_string(c.family);
    cell["variant"] = c.variant.name;
    cell["smote_k"] = c.variant.smote_k;
    cell["baseline"] = c.baseline;
    cell["average"] = sample_json(c.average);
    ojson tests = ojson::object();
    for (std::size_t m = 0; m < kAllMetrics.size(); ++m) {
      const auto key = std::string(to_string(kAllMetrics[m]));
      if (c.tests[m]) tests[key] = {{"t", c.tests[m]->t}, {"p", c.tests[m]->p}, {"df", c.tests[m]->df}};
      else tests[key] = nullptr;
    }
    cell["tests"] = std::move(tests);
    auto& samples = cell["samples"] = ojson::array();
    for (const auto& s : c.samples) samples.push_back(sample_json(s));
    auto& tuned = cell["hyperparams"] = ojson::array();
    for (const auto& hp : c.tuned) {
      ojson h = ojson::object();
      for (const auto& [k, v] : hp) h[k] = v;
      tuned.push_back(std::move(h));
    }
    results.push_back(std::move(cell));
  }
  return j;
}

inline std::string emit_machine(const BenchmarkReport& report) { return report_to_json(report).dump(1) + "\n"; }

inline BenchmarkReport report_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format_version").get<int>() != kReportFormatVersion)
      throw ValidationError("report: unsupported format_version");
    BenchmarkReport r;
    r.config = config_from_json(j.at("config"));
    const auto& ds = j.at("dataset");
    r.dataset.records = ds.at("records").get<std::size_t>();
    r.dataset.counts = {ds.at("incident").get<std::size_t>(), ds.at("serious_incident").get<std::size_t>()};
    r.dataset.schema_version = ds.at("schema_version").get<std::string>();
    r.run_seeds = j.at("run_seeds").get<std::vector<std::uint64_t>>();
    for (const auto& c : j.at("results")) {
      CellResult cell;
      cell.family = parse_family(c.at("family").get<std::string>());
      cell.variant = {c.at("variant").get<std::string>(), c.at("smote_k").get<std::size_t>()};
      cell.baseline = c.at("baseline").get<bool>();
      for (const auto& s : c.at("samples"))
        cell.samples.push_back({s.at("accuracy").get<double>(), s.at("f1").get<double>(), s.at("mcc").get<double>()});
      for (const auto& h : c.at("hyperparams")) {
        Hyperparams hp;
        for (const auto& [k, v] : h.items()) hp[k] = v.get<double>();
        cell.tuned.push_back(std::move(hp));
      }
      const auto& avg = c.at("average");
      cell.average = {avg.at("accuracy").get<double>(), avg.at("f1").get<double>(), avg.at("mcc").get<double>()};
      for (std::size_t m = 0; m < kAllMetrics.size(); ++m) {
        const auto& t = c.at("tests").at(std::string(to_string(kAllMetrics[m])));
        if (!t.is_null()) cell.tests[m] = TTestResult{t.at("t").get<double>(), t.at("p").get<double>(), t.at("df").get<double>()};
      }
      r.cells.push_back(std::move(cell));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("report: ") + e.what());
  }
}

inline BenchmarkReport parse_report(std::string_view text) {
  try {
    return report_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("report: malformed document: ") + e.what());
  }
}

/// Row label in the comparison table: "RFC (orig)", "RFC SMOTE k=1", ...
inline std::string row_label(const CellResult& c) {
  std::string label(display_name(c.family));
  if (c.variant.name == "original") return label + " (orig)";
  if (c.variant.smote_k > 0 && c.variant.name == "smote_k" + std::to_string(c.variant.smote_k))
    return label + " SMOTE k=" + std::to_string(c.variant.smote_k);
  return label + " (" + c.variant.name + ")";
}

/// Fixed-width comparison table: one row per (family, variant) and an
/// (Average, t, p-value) triplet for accuracy, F1 and MCC. Baseline rows
/// leave t and p blank; p-values below alpha print as "*".
inline std::string emit_table(const BenchmarkReport& report) {
  auto fixed4 = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return std::string(buf);
  };
  auto pad = [](const std::string& s, std::size_t w, bool right) {
    if (s.size() >= w) return s;
    return right ? std::string(w - s.size(), ' ') + s : s + std::string(w - s.size(), ' ');
  };
  constexpr std::size_t kName = 24, kAvg = 9, kT = 10, kP = 10;
  const std::size_t group = kAvg + kT + kP;

  std::string out;
  out += pad("Model Sample Runs", kName, false);
  for (const char* m : {"Accuracy", "F1 Score", "MCC"}) out += " | " + pad(m, group, false);
  out += "\n" + pad("(n=" + std::to_string(report.config.n_runs) + ")", kName, false);
  for (int i = 0; i < 3; ++i) out += " | " + pad("Average", kAvg, true) + pad("t", kT, true) + pad("p-value", kP, true);
  out += "\n" + std::string(kName, '-');
  for (int i = 0; i < 3; ++i) out += "-+-" + std::string(group, '-');
  out += "\n";

  std::optional<Family> previous;
  for (const auto& c : report.cells) {
    if (previous && *previous != c.family) out += "\n";
    previous = c.family;
    out += pad(row_label(c), kName, false);
    for (std::size_t m = 0; m < kAllMetrics.size(); ++m) {
      std::string t, p;
      if (!c.baseline) {
        if (c.tests[m]) {
          t = fixed4(c.tests[m]->t);
          p = c.tests[m]->p < report.config.alpha ? "*" : fixed4(c.tests[m]->p);
        } else {
          t = p = "n/a";
        }
      }
      out += " | " + pad(fixed4(metric_of(c.average, kAllMetrics[m])), kAvg, true) + pad(t, kT, true) + pad(p, kP, true);
    }
    // Trailing blanks on baseline rows carry no information.
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += "\n";
  }
  char alpha[32];
  std::snprintf(alpha, sizeof alpha, "%g", report.config.alpha);
  out += "\n* p < " + std::string(alpha) + " (" + (report.config.paired ? "paired" : "Welch") +
         " two-sided t-test against the " + report.config.variants.front().name + " variant)\n";
  return out;
}

} // namespace aeroclass

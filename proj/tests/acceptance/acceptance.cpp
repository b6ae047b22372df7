// Acceptance suite: one PASS/FAIL line per primary criterion. Exit status is
// non-zero when any criterion fails.

#include <aeroclass/experiment.hpp>
#include <aeroclass/knn.hpp>
#include <aeroclass/linear.hpp>
#include <aeroclass/service.hpp>

#include "support/generators.hpp"
#include "support/oracles.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <httplib.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace aeroclass;
namespace fs = std::filesystem;

namespace {

// Tolerances and budgets.
constexpr double kMetricTol = 1e-12;
constexpr double kMetricBudgetSeconds = 1.0;
constexpr double kSmoteBudgetSeconds = 10.0;
constexpr double kGradientRelTol = 1e-4;
constexpr double kLossSlack = 1e-9;
constexpr double kTTestRelTol = 0.05;
constexpr double kBenchmarkBudgetSeconds = 600.0;
constexpr double kMajorityBaseline = 0.60;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

fs::path work_dir() {
  static const fs::path dir = [] {
    auto p = fs::temp_directory_path() / ("aeroclass-acceptance-" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + AEROCLASS_CLI + "\" " + args;
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) { return read_text_file(p.string()); }

// ---------------------------------------------------------------------------

Outcome metric_oracles() {
  Outcome o;
  gen::Engine e(622);
  const auto start = Clock::now();
  for (int i = 0; i < 1000; ++i) {
    const auto cm = gen::random_confusion(e, i % 2 ? 30 : 1'000'000);
    const auto d = oracle::direct_metrics(cm);
    o.require(std::fabs(accuracy(cm) - d.accuracy) <= kMetricTol, "accuracy differs");
    o.require(std::fabs(precision(cm) - d.precision) <= kMetricTol, "precision differs");
    o.require(std::fabs(recall(cm) - d.recall) <= kMetricTol, "recall differs");
    o.require(std::fabs(f1(cm) - d.f1_ratio) <= kMetricTol, "f1 differs");
    o.require(std::fabs(mcc(cm) - d.mcc) <= kMetricTol, "mcc differs");
  }
  const double secs = seconds_since(start);
  o.require(mcc({2, 0, 2, 0}) == 1.0, "MCC(perfect) != +1");
  o.require(mcc({0, 2, 0, 2}) == -1.0, "MCC(inverted) != -1");
  o.require(secs < kMetricBudgetSeconds, "runtime " + fmt("%.3f s", secs));
  if (o.pass) o.detail = "1000 matrices, " + fmt("%.3f s", secs);
  return o;
}

Outcome f1_dual_form() {
  Outcome o;
  gen::Engine e(623);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto cm = gen::random_confusion(e, i % 2 ? 30 : 1'000'000);
    if (cm.tp + cm.fp + cm.fn == 0) continue;
    worst = std::max(worst, std::fabs(f1(cm) - f1_harmonic(cm)));
  }
  o.require(worst <= kMetricTol, "max difference " + fmt("%.3g", worst));
  if (o.pass) o.detail = "max difference " + fmt("%.3g", worst);
  return o;
}

Outcome smote_properties() {
  Outcome o;
  gen::Engine e(624);
  const auto start = Clock::now();
  for (int trial = 0; trial < 50 && o.pass; ++trial) {
    const auto ni = 20 + gen::index_below(e, 80);
    const auto ns = 8 + gen::index_below(e, 40);
    const std::size_t k = trial % 2 ? 1 : 5;
    const auto d = gen::random_dataset(e, ni, ns, kFeatureCount, trial % 3 != 0, 0.2);
    // Split first, then oversample the training side only.
    const auto split = stratified_split(d, 0.8, e());
    const auto test_before = detail::fingerprint(split.test);
    const auto out = smote(split.train, {k, e()});
    const auto why = oracle::check_smote(split.train, out, k);
    o.require(why.empty(), "dataset " + std::to_string(trial) + ": " + why);
    o.require(detail::fingerprint(split.test) == test_before, "test split modified");
  }
  // The benchmark evaluates every variant on the untouched split of its run.
  const auto data = generate_synthetic_dataset({200, 0.6, 0.15, 624});
  ExperimentConfig cfg;
  cfg.n_runs = 2;
  cfg.families = {Family::KNN};
  cfg.synthetic = SyntheticParams{};
  const auto rep = run_benchmark(cfg, data);
  for (std::size_t r = 0; r < cfg.n_runs; ++r)
    o.require(rep.test_fingerprints[r] == detail::fingerprint(stratified_split(data, cfg.ratio, rep.run_seeds[r]).test),
              "benchmark test split differs from the plain split");
  const double secs = seconds_since(start);
  o.require(secs < kSmoteBudgetSeconds, "runtime " + fmt("%.2f s", secs));
  if (o.pass) o.detail = "50 datasets, " + fmt("%.2f s", secs);
  return o;
}

Outcome knn_oracle() {
  Outcome o;
  gen::Engine e(625);
  const auto d = gen::random_dataset(e, 180, 120, kFeatureCount, true, 0.15);
  std::size_t checked = 0;
  for (std::size_t k : {1u, 4u, 5u}) {
    const auto m = KnnModel::fit(d, {k});
    for (int q = 0; q < 200; ++q) {
      const auto x = gen::random_binary_vector(e, kFeatureCount, 0.15);
      const Label got = m.score(x) > 0.5 ? Label::SeriousIncident : Label::Incident;
      o.require(got == oracle::knn_label(d, x, k), "k=" + std::to_string(k) + " query " + std::to_string(q));
      o.require(m.neighbours(x) == oracle::nearest(x, m.points(), k), "neighbour order differs");
      ++checked;
    }
  }
  if (o.pass) o.detail = std::to_string(checked) + " queries (k = 1, 4, 5)";
  return o;
}

Outcome logistic_gradient() {
  Outcome o;
  gen::Engine e(626);
  double worst = 0.0;
  for (int draw = 0; draw < 20; ++draw) {
    const auto d = gen::random_dataset(e, 5, 5, kFeatureCount, draw % 2 == 0);
    const double l2 = gen::uniform(e, 0.0, 0.5);
    std::vector<double> w(kFeatureCount + 1);
    for (auto& v : w) v = gen::uniform(e, -1.0, 1.0);
    const auto g = logistic_loss_and_gradient(w, d, l2).gradient;
    constexpr double h = 1e-5;
    for (std::size_t j = 0; j < w.size(); ++j) {
      auto plus = w, minus = w;
      plus[j] += h;
      minus[j] -= h;
      const double fd =
          (logistic_loss_and_gradient(plus, d, l2).loss - logistic_loss_and_gradient(minus, d, l2).loss) / (2 * h);
      worst = std::max(worst, std::fabs(g[j] - fd) / std::max({std::fabs(g[j]), std::fabs(fd), 1e-6}));
    }
  }
  o.require(worst < kGradientRelTol, "max relative error " + fmt("%.3g", worst));
  if (o.pass) o.detail = "20 draws, max relative error " + fmt("%.3g", worst);
  return o;
}

Outcome xgb_monotone() {
  Outcome o;
  const auto d = generate_synthetic_dataset({475, 0.6, 0.15, 627});
  double worst_rise = 0.0, first = 0.0, last = 0.0;
  for (double lr : {0.1, 0.3}) {
    std::vector<double> losses;
    BoostedTrees::fit(d, {100, lr, 3, 1.0}, [&](std::size_t, double loss) { losses.push_back(loss); });
    o.require(losses.size() == 100, "expected 100 rounds");
    for (std::size_t i = 1; i < losses.size(); ++i) worst_rise = std::max(worst_rise, losses[i] - losses[i - 1]);
    first = losses.front();
    last = losses.back();
  }
  o.require(worst_rise <= kLossSlack, "loss rose by " + fmt("%.3g", worst_rise));
  if (o.pass) o.detail = "100 rounds, loss " + fmt("%.4f", first) + " -> " + fmt("%.4f", last);
  return o;
}

Outcome split_arithmetic() {
  Outcome o;
  const auto d = generate_synthetic_dataset({475, 0.6, 0.15, 628});
  const auto c = class_counts(d);
  o.require(c.incident == 285 && c.serious == 190, "dataset is not 285/190");
  for (std::uint64_t seed : {1u, 2u, 3u, 99u}) {
    const auto a = stratified_split(d, 0.8, seed);
    const auto b = stratified_split(d, 0.8, seed);
    const auto tr = class_counts(a.train), te = class_counts(a.test);
    o.require(tr.incident == 228 && tr.serious == 152, "train counts");
    o.require(te.incident == 57 && te.serious == 38, "test counts");
    o.require(detail::fingerprint(a.train) == detail::fingerprint(b.train) &&
                  detail::fingerprint(a.test) == detail::fingerprint(b.test),
              "split not deterministic");
  }
  if (o.pass) o.detail = "train 228/152, test 57/38";
  return o;
}

ExperimentConfig protocol_config(std::size_t runs) {
  ExperimentConfig cfg;
  cfg.n_runs = runs;
  cfg.synthetic = SyntheticParams{475, 0.6, 0.15, 7};
  return cfg;
}

Outcome desk_scale_protocol(BenchmarkReport& out) {
  Outcome o;
  const auto cfg = protocol_config(20);
  const auto data = generate_synthetic_dataset(*cfg.synthetic);
  const auto start = Clock::now();
  out = run_benchmark(cfg, data);
  const double secs = seconds_since(start);
  std::cout << emit_table(out) << std::flush;

  const auto* rfc = out.find(Family::RFC, "original");
  const auto* knn = out.find(Family::KNN, "original");
  o.require(rfc && knn, "missing rows");
  if (!o.pass) return o;
  o.require(rfc->average.accuracy >= knn->average.accuracy,
            "(a) RFC " + fmt("%.4f", rfc->average.accuracy) + " < KNN " + fmt("%.4f", knn->average.accuracy));
  for (auto f : kAllFamilies) {
    const auto* c = out.find(f, "original");
    o.require(c->average.accuracy > kMajorityBaseline,
              "(b) " + std::string(display_name(f)) + " accuracy " + fmt("%.4f", c->average.accuracy));
  }
  for (const auto& c : out.cells) {
    for (double v : {c.average.accuracy, c.average.f1, c.average.mcc})
      o.require(v >= 0.0 && v <= 1.0, "(c) average outside [0,1] in " + row_label(c));
    o.require(c.average.mcc > 0.0, "(c) MCC average not positive in " + row_label(c));
  }
  o.require(secs < kBenchmarkBudgetSeconds, "runtime " + fmt("%.0f s", secs));
  if (o.pass)
    o.detail = "RFC " + fmt("%.4f", rfc->average.accuracy) + " >= KNN " + fmt("%.4f", knn->average.accuracy) + ", " +
               fmt("%.0f s", secs);
  return o;
}

Outcome ttest_sanity() {
  Outcome o;
  auto cfg = protocol_config(3);
  cfg.variants = {{"original", 0}, {"original_again", 0}};
  const auto rep = run_benchmark(cfg, generate_synthetic_dataset(*cfg.synthetic));
  for (auto f : kAllFamilies) {
    const auto* c = rep.find(f, "original_again");
    for (std::size_t m = 0; m < 3; ++m) {
      const auto& t = c->tests[m];
      o.require(t && t->t == 0.0 && t->p == 1.0,
                "self-comparison for " + std::string(display_name(f)) + " " + std::string(to_string(kAllMetrics[m])));
    }
  }
  const std::vector<double> a{0.70, 0.72, 0.74, 0.76, 0.78}, b{0.60, 0.62, 0.64, 0.66, 0.68};
  const auto r = welch_t_test(a, b);
  boost::math::students_t dist(8.0);
  const double p_ref = 2.0 * boost::math::cdf(boost::math::complement(dist, 5.0));
  o.require(std::fabs(r.t - 5.0) <= kTTestRelTol * 5.0, "t = " + fmt("%.6f", r.t));
  o.require(std::fabs(r.df - 8.0) <= kTTestRelTol * 8.0, "df = " + fmt("%.6f", r.df));
  o.require(std::fabs(r.p - p_ref) <= kTTestRelTol * p_ref, "p = " + fmt("%.6g", r.p));
  if (o.pass)
    o.detail = "t=" + fmt("%.4f", r.t) + " df=" + fmt("%.1f", r.df) + " p=" + fmt("%.6f", r.p) + " (reference " +
               fmt("%.6f", p_ref) + ")";
  return o;
}

Outcome determinism(const BenchmarkReport& in_process) {
  Outcome o;
  const auto dir = work_dir();
  auto cfg = protocol_config(3);
  write_text_file((dir / "det.json").string(), config_to_json(cfg).dump(2));
  const auto a = dir / "det_a.json", b = dir / "det_b.json";
  o.require(run_cli("benchmark -q -c \"" + (dir / "det.json").string() + "\" -o \"" + a.string() + "\"") == 0,
            "first benchmark failed");
  o.require(run_cli("benchmark -q -c \"" + (dir / "det.json").string() + "\" -o \"" + b.string() + "\"") == 0,
            "second benchmark failed");
  if (!o.pass) return o;
  o.require(slurp(a) == slurp(b), "machine reports differ");
  // The first three runs of the 20-run protocol use the same seeds.
  const auto cli = parse_report(slurp(a));
  for (std::size_t i = 0; i < cli.cells.size(); ++i)
    for (std::size_t r = 0; r < 3; ++r) {
      const auto& x = cli.cells[i].samples[r];
      const auto& y = in_process.cells[i].samples[r];
      o.require(x.accuracy == y.accuracy && x.f1 == y.f1 && x.mcc == y.mcc, "CLI and library samples differ");
    }

  gen::Engine e(631);
  const auto data = generate_synthetic_dataset({300, 0.6, 0.15, 631});
  std::vector<FeatureVector> queries;
  for (int i = 0; i < 100; ++i) queries.push_back(gen::random_binary_vector(e, kFeatureCount, 0.15));
  for (auto f : kAllFamilies) {
    const auto m = fit(f, resolve_hyperparams(f, {}), data, 5);
    const auto path = (dir / ("model_" + std::string(to_string(f)) + ".json")).string();
    save_model(m, path);
    const auto back = load_model(path);
    for (const auto& q : queries)
      o.require(predict_score(back, q) == predict_score(m, q), "round-trip differs for " + std::string(to_string(f)));
    o.require(serialize_model(back) == serialize_model(m), "re-serialization differs");
  }
  if (o.pass) o.detail = "byte-identical reports; 5 families x 100 vectors round-trip";
  return o;
}

int free_port() {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  const int port = ntohs(addr.sin_port);
  ::close(fd);
  return port;
}

Outcome cli_service_end_to_end() {
  Outcome o;
  const auto dir = work_dir();
  const auto csv = (dir / "e2e.csv").string(), model_path = (dir / "e2e_model.json").string();
  o.require(run_cli("generate-synthetic --n 475 --seed 11 -o \"" + csv + "\"") == 0, "generate-synthetic failed");
  o.require(run_cli("train-final -d \"" + csv + "\" --family rfc --seed 3 -o \"" + model_path + "\" 2>/dev/null") == 0,
            "train-final failed");
  if (!o.pass) return o;

  const int port = free_port();
  const std::string addr = "127.0.0.1:" + std::to_string(port);
  const pid_t pid = ::fork();
  if (pid == 0) {
    ::execl(AEROCLASS_CLI, AEROCLASS_CLI, "serve", "-m", model_path.c_str(), "--addr", addr.c_str(),
            static_cast<char*>(nullptr));
    ::_exit(127);
  }
  httplib::Client client("127.0.0.1", port);
  bool up = false;
  for (int i = 0; i < 100 && !up; ++i) {
    if (auto r = client.Get("/api/v1/health"); r && r->status == 200) up = true;
    else std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  o.require(up, "server did not come up on " + addr);

  if (up) {
    const PredictionService local(canonical_schema(), load_model(model_path));
    gen::Engine e(632);
    std::vector<std::vector<std::string>> selections{{"landing_phase", "excursion", "weather"}, {}};
    for (int i = 0; i < 48; ++i) selections.push_back(gen::random_selection(e, 0.1));
    for (const auto& ids : selections) {
      const auto res =
          client.Post("/api/v1/predict", nlohmann::json{{"selected_features", ids}}.dump(), "application/json");
      o.require(res && res->status == 200, "predict request failed");
      if (!res || res->status != 200) break;
      const auto got = nlohmann::json::parse(res->body);
      const auto want = local.predict(ids);
      o.require(got.contains("label") && got.contains("label_display") && got.contains("score") &&
                    got.contains("model_family") && got.contains("model_version"),
                "response missing fields");
      o.require(got["label"] == std::string(to_string(want.label)) && got["score"].get<double>() == want.score &&
                    got["model_version"] == want.model_version,
                "service and in-process predictions differ");
    }
    const auto bad = client.Post("/api/v1/predict", R"({"selected_features": ["bogus"]})", "application/json");
    o.require(bad && bad->status == 422, "unknown feature not rejected with 422");
    if (o.pass) o.detail = std::to_string(selections.size()) + " requests on " + addr;
  }
  ::kill(pid, SIGTERM);
  ::waitpid(pid, nullptr, 0);
  return o;
}

} // namespace

int main() {
  int failed = 0;
  auto report = [&](const char* name, const Outcome& o) {
    std::cout << (o.pass ? "PASS  " : "FAIL  ") << name << (o.detail.empty() ? "" : "  (" + o.detail + ")")
              << std::endl;
    failed += o.pass ? 0 : 1;
  };
  auto guarded = [](const std::function<Outcome()>& fn) {
    try {
      return fn();
    } catch (const std::exception& e) {
      return Outcome{false, std::string("exception: ") + e.what()};
    }
  };

  report("metric oracles", guarded(metric_oracles));
  report("F1 dual-form identity", guarded(f1_dual_form));
  report("SMOTE properties", guarded(smote_properties));
  report("KNN brute-force oracle", guarded(knn_oracle));
  report("logistic gradient vs finite differences", guarded(logistic_gradient));
  report("XGB monotone training loss", guarded(xgb_monotone));
  report("stratified split arithmetic", guarded(split_arithmetic));
  BenchmarkReport protocol;
  report("desk-scale protocol", guarded([&] { return desk_scale_protocol(protocol); }));
  report("t-test sanity", guarded(ttest_sanity));
  report("determinism", guarded([&] { return protocol.cells.empty() ? Outcome{false, "no protocol report"}
                                                                     : determinism(protocol); }));
  report("CLI + service end to end", guarded(cli_service_end_to_end));

  std::error_code ec;
  fs::remove_all(work_dir(), ec);
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}

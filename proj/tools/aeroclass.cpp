// Command-line front end: schema and dataset validation, synthetic data,
// benchmarking, report rendering, final training, prediction and serving.
//
// Exit codes: 0 success, 1 invalid input (validation failure), 2 I/O or
// runtime failure. Argument errors use CLI11's own non-zero codes.

#include <aeroclass/experiment.hpp>
#include <aeroclass/http_server.hpp>
#include <aeroclass/model.hpp>
#include <aeroclass/schema.hpp>
#include <aeroclass/service.hpp>
#include <aeroclass/synthetic.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace aeroclass;
namespace fs = std::filesystem;

constexpr int kExitInvalid = 1;
constexpr int kExitRuntime = 2;

FeatureSchema schema_from(const std::string& path) {
  if (path.empty()) return canonical_schema();
  return load_schema(read_text_file(path));
}

Dataset dataset_from(const std::string& path, const FeatureSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset '" + path + "'");
  return load_dataset(in, schema);
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") std::cout << text;
  else write_text_file(path, text);
}

std::pair<std::string, int> parse_addr(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos) throw ValidationError("address must be host:port, got '" + addr + "'");
  int port = 0;
  const auto digits = addr.substr(colon + 1);
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
  if (ec != std::errc{} || ptr != digits.data() + digits.size() || port < 0 || port > 65535)
    throw ValidationError("invalid port in '" + addr + "'");
  return {addr.substr(0, colon), port};
}

std::vector<std::string> split_ids(const std::string& list) {
  std::vector<std::string> ids;
  std::stringstream ss(list);
  std::string id;
  while (std::getline(ss, id, ',')) {
    while (!id.empty() && id.front() == ' ') id.erase(0, 1);
    while (!id.empty() && id.back() == ' ') id.pop_back();
    if (!id.empty()) ids.push_back(id);
  }
  return ids;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incident / serious-incident occurrence classifier"};
  app.require_subcommand(1);

  std::string schema_path;
  app.add_option("--schema", schema_path, "Schema document (defaults to the bundled schema)");

  // schema validate | show
  auto* schema_cmd = app.add_subcommand("schema", "Schema utilities");
  schema_cmd->require_subcommand(1);
  auto* schema_validate = schema_cmd->add_subcommand("validate", "Validate a schema document");
  std::string schema_file;
  schema_validate->add_option("file", schema_file, "Schema document (defaults to --schema or the bundled schema)");
  auto* schema_show = schema_cmd->add_subcommand("show", "Print the schema with vector indices");

  // dataset validate
  auto* dataset_cmd = app.add_subcommand("dataset", "Dataset utilities");
  dataset_cmd->require_subcommand(1);
  auto* dataset_validate = dataset_cmd->add_subcommand("validate", "Validate a dataset file against the schema");
  std::string dataset_file;
  dataset_validate->add_option("file", dataset_file, "Dataset CSV")->required();

  // generate-synthetic
  auto* gen = app.add_subcommand("generate-synthetic", "Write a planted-rule synthetic dataset");
  SyntheticParams synth;
  std::string gen_out;
  gen->add_option("--n", synth.n, "Number of records")->capture_default_str();
  gen->add_option("--imbalance", synth.imbalance, "Fraction of incident records")->capture_default_str();
  gen->add_option("--noise", synth.noise, "Label flip rate in [0, 0.5)")->capture_default_str();
  gen->add_option("--seed", synth.seed, "Random seed")->capture_default_str();
  gen->add_option("--out,-o", gen_out, "Output CSV (stdout when omitted)");

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "Run the repeated train/test benchmark");
  std::string config_path, bench_out, bench_data;
  std::optional<std::size_t> runs, threads;
  std::optional<std::uint64_t> base_seed;
  bool bench_table = false, quiet = false;
  bench->add_option("--config,-c", config_path, "Experiment config (JSON)")->required();
  bench->add_option("--runs", runs, "Override n_runs");
  bench->add_option("--seed", base_seed, "Override base_seed");
  bench->add_option("--data", bench_data, "Override dataset path");
  bench->add_option("--threads", threads, "Worker threads (results do not depend on it)");
  bench->add_option("--out,-o", bench_out, "Machine report output (stdout when omitted)");
  bench->add_flag("--table", bench_table, "Also print the comparison table to stderr");
  bench->add_flag("--quiet,-q", quiet, "No progress output");

  // report
  auto* report_cmd = app.add_subcommand("report", "Render a machine report");
  std::string report_in, report_format = "table";
  report_cmd->add_option("--in,-i", report_in, "Machine report produced by 'benchmark'")->required();
  report_cmd->add_option("--format,-f", report_format, "table | machine")
      ->check(CLI::IsMember({"table", "machine"}))
      ->capture_default_str();

  // train-final
  auto* train_cmd = app.add_subcommand("train-final", "Tune and train on the full dataset, write a model file");
  std::string train_data, train_family = "rfc", train_out;
  std::uint64_t train_seed = 1;
  train_cmd->add_option("--data,-d", train_data, "Dataset CSV")->required();
  train_cmd->add_option("--family", train_family, "rfc | xgb | logr | svm | knn")->capture_default_str();
  train_cmd->add_option("--seed", train_seed, "Random seed")->capture_default_str();
  train_cmd->add_option("--out,-o", train_out, "Model file to write")->required();

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "Classify one occurrence from its feature ids");
  std::string predict_model, predict_features;
  predict_cmd->add_option("--model,-m", predict_model, "Model file")->required();
  predict_cmd->add_option("--features", predict_features, "Comma-separated feature ids")->required();

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Serve the prediction API over HTTP");
  std::string serve_model, serve_addr = "127.0.0.1:8080", static_dir;
  serve_cmd->add_option("--model,-m", serve_model, "Model file")->required();
  serve_cmd->add_option("--addr", serve_addr, "host:port to bind")->capture_default_str();
  serve_cmd->add_option("--static", static_dir, "Directory of static UI assets to serve at /");

  CLI11_PARSE(app, argc, argv);

  try {
    if (schema_validate->parsed()) {
      const auto path = schema_file.empty() ? schema_path : schema_file;
      const auto schema = schema_from(path);
      std::cout << "ok: schema " << schema.version() << ", " << schema.classes().size() << " classes, "
                << schema.size() << " features\n";
    } else if (schema_show->parsed()) {
      std::cout << schema_from(schema_path).to_json().dump(2) << "\n";
    } else if (dataset_validate->parsed()) {
      const auto schema = schema_from(schema_path);
      const auto d = dataset_from(dataset_file, schema);
      const auto c = class_counts(d);
      std::cout << "ok: " << d.size() << " records (incident " << c.incident << ", serious_incident " << c.serious
                << ")\n";
    } else if (gen->parsed()) {
      const auto schema = schema_from(schema_path);
      const auto d = generate_synthetic_dataset(synth, schema);
      std::ostringstream out;
      write_dataset(out, d, schema);
      write_output(gen_out, out.str());
    } else if (bench->parsed()) {
      auto cfg = config_from_json(nlohmann::json::parse(read_text_file(config_path)));
      if (runs) cfg.n_runs = *runs;
      if (base_seed) cfg.base_seed = *base_seed;
      if (threads) cfg.threads = *threads;
      if (!bench_data.empty()) {
        cfg.dataset = bench_data;
        cfg.synthetic.reset();
      } else if (!cfg.dataset.empty() && fs::path(cfg.dataset).is_relative()) {
        cfg.dataset = (fs::path(config_path).parent_path() / cfg.dataset).lexically_normal().string();
      }
      cfg.validate();
      const auto schema = schema_from(schema_path);
      const auto data = load_experiment_dataset(cfg, schema);
      const auto report = run_benchmark(cfg, data, [&](std::size_t done, std::size_t total) {
        if (!quiet) std::cerr << "\rrun " << done << "/" << total << std::flush;
      });
      if (!quiet) std::cerr << "\n";
      write_output(bench_out, emit_machine(report));
      if (bench_table) std::cerr << emit_table(report);
    } else if (report_cmd->parsed()) {
      const auto report = parse_report(read_text_file(report_in));
      std::cout << (report_format == "machine" ? emit_machine(report) : emit_table(report));
    } else if (train_cmd->parsed()) {
      const auto schema = schema_from(schema_path);
      const auto data = dataset_from(train_data, schema);
      const auto model = train_final(data, schema, parse_family(train_family), train_seed);
      save_model(model, train_out);
      const auto cm = evaluate_model(model, data);
      std::cerr << "trained " << to_string(model.family) << " on " << data.size() << " records, training accuracy "
                << accuracy(cm) << ", version " << model_version(model) << "\n";
    } else if (predict_cmd->parsed()) {
      const PredictionService service(schema_from(schema_path), load_model(predict_model));
      std::cout << PredictionService::to_json(service.predict(split_ids(predict_features))).dump(2) << "\n";
    } else if (serve_cmd->parsed()) {
      const auto [host, port] = parse_addr(serve_addr);
      const PredictionService service(schema_from(schema_path), load_model(serve_model));
      HttpServer server(service, static_dir);
      std::cerr << "serving " << service.version() << " on http://" << host << ":" << port << "\n";
      server.listen(host, port);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}

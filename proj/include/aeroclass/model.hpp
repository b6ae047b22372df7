#pragma once

#include <aeroclass/boosting.hpp>
#include <aeroclass/dataset.hpp>
#include <aeroclass/error.hpp>
#include <aeroclass/forest.hpp>
#include <aeroclass/knn.hpp>
#include <aeroclass/linear.hpp>
#include <aeroclass/metrics.hpp>

#include <json.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace aeroclass {

enum class Family : std::uint8_t { RFC, XGB, LOGR, SVM, KNN };

inline constexpr std::array<Family, 5> kAllFamilies{Family::RFC, Family::XGB, Family::LOGR, Family::SVM, Family::KNN};

/// Machine name used in files, configs and on the command line.
inline std::string_view to_string(Family f) noexcept {
  switch (f) {
  case Family::RFC: return "rfc";
  case Family::XGB: return "xgb";
  case Family::LOGR: return "logr";
  case Family::SVM: return "svm";
  case Family::KNN: return "knn";
  }
  return "?";
}

/// Name as printed in comparison tables.
inline std::string_view display_name(Family f) noexcept {
  switch (f) {
  case Family::RFC: return "RFC";
  case Family::XGB: return "XGB";
  case Family::LOGR: return "Log R";
  case Family::SVM: return "SVM";
  case Family::KNN: return "KNN";
  }
  return "?";
}

inline Family parse_family(std::string_view name) {
  for (auto f : kAllFamilies)
    if (to_string(f) == name) return f;
  throw ValidationError("unknown model family '" + std::string(name) + "' (expected rfc | xgb | logr | svm | knn)");
}

using Hyperparams = std::map<std::string, double>;

struct ParamDef {
  std::string_view name;
  double default_value;
  double min;
  double max;
  bool integer;
};

inline std::vector<ParamDef> param_defs(Family f) {
  switch (f) {
  case Family::RFC:
    return {{"n_trees", 100, 1, 100000, true},
            {"max_depth", 8, 0, 64, true},
            {"bootstrap", 1, 0, 1, true},
            {"max_features", 0, 0, 100000, true}};
  case Family::XGB:
    return {{"rounds", 100, 1, 100000, true},
            {"learning_rate", 0.1, 1e-6, 1, false},
            {"max_depth", 3, 1, 32, true},
            {"lambda", 1, 0, 1e6, false}};
  case Family::LOGR:
    return {{"l2", 0.01, 0, 1e12, false}};
  case Family::SVM:
    return {{"lambda", 1e-3, 1e-12, 1e6, false}, {"epochs", 200, 1, 1000000, true}};
  case Family::KNN:
    return {{"k", 5, 1, 1000000, true}};
  }
  return {};
}

/// Checks keys and bounds, then fills every unspecified parameter with its default.
inline Hyperparams resolve_hyperparams(Family f, const Hyperparams& hp) {
  const auto defs = param_defs(f);
  Hyperparams out;
  for (const auto& [name, value] : hp) {
    const auto it = std::find_if(defs.begin(), defs.end(), [&](const ParamDef& d) { return d.name == name; });
    if (it == defs.end())
      throw ValidationError("hyperparameter '" + name + "' does not belong to family " + std::string(to_string(f)));
    if (!std::isfinite(value) || value < it->min || value > it->max)
      throw ValidationError("hyperparameter '" + name + "' out of range");
    if (it->integer && value != std::floor(value))
      throw ValidationError("hyperparameter '" + name + "' must be an integer");
    out[name] = value;
  }
  for (const auto& d : defs) out.try_emplace(std::string(d.name), d.default_value);
  return out;
}

/// Search space of a family. Grid points enumerate the cartesian product in
/// axis order with the last axis varying fastest.
struct ModelSpec {
  Family family = Family::RFC;
  std::vector<std::pair<std::string, std::vector<double>>> grid;

  std::vector<Hyperparams> grid_points() const {
    std::vector<Hyperparams> points{Hyperparams{}};
    for (const auto& [name, values] : grid) {
      std::vector<Hyperparams> next;
      for (const auto& p : points) {
        for (double v : values) {
          auto q = p;
          q[name] = v;
          next.push_back(std::move(q));
        }
      }
      points = std::move(next);
    }
    return points;
  }
};

inline ModelSpec default_spec(Family f) {
  switch (f) {
  case Family::RFC: return {f, {{"n_trees", {50, 100, 200}}, {"max_depth", {4, 8, 16}}}};
  case Family::XGB:
    return {f, {{"rounds", {50, 100}}, {"learning_rate", {0.1, 0.3}}, {"max_depth", {2, 3, 4}}, {"lambda", {1}}}};
  case Family::LOGR: return {f, {{"l2", {0.001, 0.01, 0.1, 1}}}};
  case Family::SVM: return {f, {{"lambda", {1e-4, 1e-3, 1e-2}}}};
  case Family::KNN: return {f, {{"k", {1, 3, 5, 7, 9}}}};
  }
  return {f, {}};
}

/// A fitted classifier of one family plus the metadata needed to serve it.
struct TrainedModel {
  using Learned = std::variant<RandomForest, BoostedTrees, LogisticModel, LinearSvm, KnnModel>;

  Family family = Family::RFC;
  Hyperparams hyperparams;
  std::string schema_version;
  std::size_t trained_on = 0;
  std::uint64_t seed = 0;
  Learned learned;

  std::size_t n_features() const {
    return std::visit([](const auto& m) { return m.n_features(); }, learned);
  }
};

namespace detail {

inline std::size_t as_size(const Hyperparams& hp, const char* key) { return static_cast<std::size_t>(hp.at(key)); }

} // namespace detail

/// Trains one family. Deterministic in (family, hp, train, seed). Every
/// family except KNN requires both classes in `train`.
inline TrainedModel fit(Family family, const Hyperparams& hp, const Dataset& train, std::uint64_t seed) {
  if (train.empty()) throw ValidationError("fit: empty training set");
  const auto counts = class_counts(train);
  if (family != Family::KNN && (counts.incident == 0 || counts.serious == 0))
    throw ValidationError("fit: " + std::string(to_string(family)) + " needs both classes in the training set");

  TrainedModel m;
  m.family = family;
  m.hyperparams = resolve_hyperparams(family, hp);
  m.schema_version = train.schema_version;
  m.trained_on = train.size();
  m.seed = seed;
  const auto& p = m.hyperparams;
  switch (family) {
  case Family::RFC:
    m.learned = RandomForest::fit(
        train, {detail::as_size(p, "n_trees"), detail::as_size(p, "max_depth"), p.at("bootstrap") != 0.0,
                detail::as_size(p, "max_features")},
        seed);
    break;
  case Family::XGB:
    m.learned = BoostedTrees::fit(
        train, {detail::as_size(p, "rounds"), p.at("learning_rate"), detail::as_size(p, "max_depth"), p.at("lambda")});
    break;
  case Family::LOGR: m.learned = LogisticModel::fit(train, {p.at("l2")}); break;
  case Family::SVM: m.learned = LinearSvm::fit(train, {p.at("lambda"), detail::as_size(p, "epochs")}, seed); break;
  case Family::KNN: m.learned = KnnModel::fit(train, {detail::as_size(p, "k")}); break;
  }
  return m;
}

inline TrainedModel fit(const ModelSpec& spec, const Hyperparams& hp, const Dataset& train, std::uint64_t seed) {
  return fit(spec.family, hp, train, seed);
}

/// Score in [0, 1]: tree vote fraction (RFC), neighbour vote fraction (KNN),
/// logistic of the margin (XGB, LOGR, SVM).
inline double predict_score(const TrainedModel& m, std::span<const double> x) {
  if (x.size() != m.n_features())
    throw ValidationError("schema version mismatch: model expects " + std::to_string(m.n_features()) +
                          " features, got " + std::to_string(x.size()));
  return std::visit([&](const auto& learned) { return learned.score(x); }, m.learned);
}

/// SeriousIncident iff score > 0.5. An exact 0.5 (tied vote, zero margin)
/// resolves to Incident, the majority class.
inline Label label_for_score(double score) noexcept {
  return score > 0.5 ? Label::SeriousIncident : Label::Incident;
}

inline Label predict(const TrainedModel& m, std::span<const double> x) { return label_for_score(predict_score(m, x)); }

inline ConfusionMatrix evaluate_model(const TrainedModel& m, const Dataset& data) {
  std::vector<Label> truth, pred;
  truth.reserve(data.size());
  pred.reserve(data.size());
  for (const auto& r : data.records) {
    truth.push_back(r.label);
    pred.push_back(predict(m, r.features));
  }
  return confusion(truth, pred);
}

// ---------------------------------------------------------------------------
// Model file
//
// {
//   "format_version": 1,
//   "family": "rfc" | "xgb" | "logr" | "svm" | "knn",
//   "schema_version": "...",
//   "hyperparams": { name: number, ... },
//   "seed": unsigned,
//   "trained_on": record count,
//   "n_features": d,
//   "parameters": family specific, see below
// }
//
// rfc:  { "trees": [ tree, ... ] }, tree = [ node, ... ] in pre-order with
//       internal node [feature, threshold, left, right], leaf [n_incident, n_serious]
// xgb:  { "base_margin": m, "trees": [ tree, ... ] }, leaf [value]
// logr: { "weights": [w_0 .. w_{d-1}, intercept] }
// svm:  { "weights": [...], "bias": b }
// knn:  { "k": k, "labels": [0 | 1, ...], "points": [[...], ...] }

inline constexpr int kModelFormatVersion = 1;

namespace detail {

using ojson = nlohmann::ordered_json;

template <typename Leaf, typename LeafWriter>
ojson tree_to_json(const Tree<Leaf>& tree, LeafWriter&& write_leaf) {
  ojson nodes = ojson::array();
  for (const auto& n : tree.nodes) {
    if (n.is_leaf()) nodes.push_back(write_leaf(n.leaf));
    else nodes.push_back(ojson::array({n.feature, n.threshold, n.left, n.right}));
  }
  return nodes;
}

template <typename Leaf, typename LeafReader>
Tree<Leaf> tree_from_json(const nlohmann::json& j, std::size_t leaf_arity, std::size_t n_features,
                          LeafReader&& read_leaf) {
  Tree<Leaf> tree;
  if (!j.is_array() || j.empty()) throw ValidationError("model file: tree must be a non-empty array");
  for (const auto& node : j) {
    typename Tree<Leaf>::Node n;
    if (node.is_array() && node.size() == 4) {
      n.feature = node[0].get<std::int32_t>();
      n.threshold = node[1].get<double>();
      n.left = node[2].get<std::int32_t>();
      n.right = node[3].get<std::int32_t>();
      if (n.feature < 0 || static_cast<std::size_t>(n.feature) >= n_features)
        throw ValidationError("model file: split feature out of range");
    } else if (node.is_array() && node.size() == leaf_arity) {
      n.leaf = read_leaf(node);
    } else {
      throw ValidationError("model file: malformed tree node");
    }
    tree.nodes.push_back(n);
  }
  const auto count = static_cast<std::int32_t>(tree.nodes.size());
  for (std::int32_t i = 0; i < count; ++i) {
    const auto& n = tree.nodes[static_cast<std::size_t>(i)];
    if (!n.is_leaf() && (n.left <= i || n.right <= i || n.left >= count || n.right >= count))
      throw ValidationError("model file: tree child index out of range");
  }
  return tree;
}

} // namespace detail

inline nlohmann::ordered_json model_to_json(const TrainedModel& m) {
  using detail::ojson;
  ojson doc;
  doc["format_version"] = kModelFormatVersion;
  doc["family"] = to_string(m.family);
  doc["schema_version"] = m.schema_version;
  doc["hyperparams"] = ojson::object();
  for (const auto& [k, v] : m.hyperparams) doc["hyperparams"][k] = v;
  doc["seed"] = m.seed;
  doc["trained_on"] = m.trained_on;
  doc["n_features"] = m.n_features();

  ojson params;
  std::visit(
      [&](const auto& learned) {
        using T = std::decay_t<decltype(learned)>;
        if constexpr (std::is_same_v<T, RandomForest>) {
          auto& trees = params["trees"] = ojson::array();
          for (const auto& t : learned.trees())
            trees.push_back(detail::tree_to_json(t, [](const ClassLeaf& l) { return ojson::array({l.incident, l.serious}); }));
        } else if constexpr (std::is_same_v<T, BoostedTrees>) {
          params["base_margin"] = learned.base_margin();
          auto& trees = params["trees"] = ojson::array();
          for (const auto& t : learned.trees())
            trees.push_back(detail::tree_to_json(t, [](double v) { return ojson::array({v}); }));
        } else if constexpr (std::is_same_v<T, LogisticModel>) {
          params["weights"] = learned.weights();
        } else if constexpr (std::is_same_v<T, LinearSvm>) {
          params["weights"] = learned.weights();
          params["bias"] = learned.bias();
        } else {
          params["k"] = learned.k();
          auto& labels = params["labels"] = ojson::array();
          for (auto l : learned.labels()) labels.push_back(l == Label::SeriousIncident ? 1 : 0);
          params["points"] = learned.points();
        }
      },
      m.learned);
  doc["parameters"] = std::move(params);
  return doc;
}

inline TrainedModel model_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format_version").get<int>() != kModelFormatVersion)
      throw ValidationError("model file: unsupported format_version");
    TrainedModel m;
    m.family = parse_family(doc.at("family").get<std::string>());
    m.schema_version = doc.at("schema_version").get<std::string>();
    Hyperparams hp;
    for (const auto& [k, v] : doc.at("hyperparams").items()) hp[k] = v.get<double>();
    m.hyperparams = resolve_hyperparams(m.family, hp);
    m.seed = doc.at("seed").get<std::uint64_t>();
    m.trained_on = doc.at("trained_on").get<std::size_t>();
    const auto d = doc.at("n_features").get<std::size_t>();
    const auto& p = doc.at("parameters");
    switch (m.family) {
    case Family::RFC: {
      std::vector<DecisionTree> trees;
      for (const auto& t : p.at("trees"))
        trees.push_back(detail::tree_from_json<ClassLeaf>(t, 2, d, [](const nlohmann::json& n) {
          return ClassLeaf{n[0].get<std::uint64_t>(), n[1].get<std::uint64_t>()};
        }));
      if (trees.empty()) throw ValidationError("model file: forest has no trees");
      m.learned = RandomForest(std::move(trees), d);
      break;
    }
    case Family::XGB: {
      std::vector<RegressionTree> trees;
      for (const auto& t : p.at("trees"))
        trees.push_back(detail::tree_from_json<double>(t, 1, d, [](const nlohmann::json& n) { return n[0].get<double>(); }));
      m.learned = BoostedTrees(p.at("base_margin").get<double>(), std::move(trees), d);
      break;
    }
    case Family::LOGR: {
      auto w = p.at("weights").get<std::vector<double>>();
      if (w.size() != d + 1) throw ValidationError("model file: logr weights must have n_features + 1 entries");
      m.learned = LogisticModel(std::move(w));
      break;
    }
    case Family::SVM: {
      auto w = p.at("weights").get<std::vector<double>>();
      if (w.size() != d) throw ValidationError("model file: svm weights must have n_features entries");
      m.learned = LinearSvm(std::move(w), p.at("bias").get<double>());
      break;
    }
    case Family::KNN: {
      auto points = p.at("points").get<std::vector<FeatureVector>>();
      std::vector<Label> labels;
      for (const auto& l : p.at("labels")) labels.push_back(l.get<int>() != 0 ? Label::SeriousIncident : Label::Incident);
      for (const auto& pt : points)
        if (pt.size() != d) throw ValidationError("model file: knn point has wrong dimension");
      m.learned = KnnModel(p.at("k").get<std::size_t>(), std::move(points), std::move(labels));
      break;
    }
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("model file: ") + e.what());
  }
}

inline std::string serialize_model(const TrainedModel& m) { return model_to_json(m).dump(1) + "\n"; }

inline TrainedModel parse_model(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("model file: malformed document: ") + e.what());
  }
  return model_from_json(doc);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("failed writing '" + path + "'");
}

inline void save_model(const TrainedModel& m, const std::string& path) { write_text_file(path, serialize_model(m)); }
inline TrainedModel load_model(const std::string& path) { return parse_model(read_text_file(path)); }

/// "<family>-<16 hex digits>": FNV-1a 64 of the serialized model.
inline std::string model_version(const TrainedModel& m) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_model(m)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(to_string(m.family)) + "-" + buf;
}

} // namespace aeroclass

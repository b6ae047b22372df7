#pragma once

#include <aeroclass/dataset.hpp>
#include <aeroclass/model.hpp>
#include <aeroclass/schema.hpp>
#include <aeroclass/tuning.hpp>

#include <json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace aeroclass {

/// Tunes `family` with 3-fold CV on the whole dataset and fits on all of it.
inline TrainedModel train_final(const Dataset& data, const FeatureSchema& schema, Family family, std::uint64_t seed) {
  if (data.empty()) throw ValidationError("train-final: empty dataset");
  if (data.schema_version != schema.version())
    throw ValidationError("train-final: dataset schema version '" + data.schema_version + "' does not match '" +
                          schema.version() + "'");
  for (const auto& r : data.records) validate_vector(schema, r.features);
  const auto hp = tune(default_spec(family), data, derive_seed(seed, 1));
  return fit(family, hp, data, derive_seed(seed, 2));
}

struct PredictionResponse {
  Label label = Label::Incident;
  double score = 0.0;
  Family model_family = Family::RFC;
  std::string model_version;
};

struct HttpResult {
  int status = 200;
  nlohmann::ordered_json body;
};

inline nlohmann::ordered_json error_body(std::string_view code, std::string_view message,
                                         nlohmann::ordered_json detail = nlohmann::ordered_json::object()) {
  return {{"code", code}, {"message", message}, {"detail", std::move(detail)}};
}

/// Request handling for the prediction API, independent of the transport.
/// Holds an immutable model and schema; every method is const and safe to
/// call concurrently.
///
///   GET  /api/v1/health   -> {"status": "ok", "model_version": ...}
///   GET  /api/v1/schema   -> schema document
///   POST /api/v1/predict  {"selected_features": [ids]}
///                         -> {"label", "label_display", "score", "model_family", "model_version"}
///
/// Errors carry {"code", "message", "detail"}: 400 for malformed bodies,
/// 422 for unknown feature ids, 404 for unknown routes.
class PredictionService {
public:
  PredictionService(FeatureSchema schema, TrainedModel model)
      : schema_(std::move(schema)), model_(std::move(model)), version_(model_version(model_)) {
    if (model_.schema_version != schema_.version())
      throw ValidationError("model schema version '" + model_.schema_version + "' does not match schema '" +
                            schema_.version() + "'");
    if (model_.n_features() != schema_.size())
      throw ValidationError("model expects " + std::to_string(model_.n_features()) + " features, schema has " +
                            std::to_string(schema_.size()));
  }

  const FeatureSchema& schema() const noexcept { return schema_; }
  const TrainedModel& model() const noexcept { return model_; }
  const std::string& version() const noexcept { return version_; }

  template <typename Ids>
  PredictionResponse predict(const Ids& selected) const {
    const auto x = encode(schema_, selected);
    const double score = predict_score(model_, x);
    return {label_for_score(score), score, model_.family, version_};
  }

  static nlohmann::ordered_json to_json(const PredictionResponse& r) {
    return {{"label", to_string(r.label)},
            {"label_display", display_name(r.label)},
            {"score", r.score},
            {"model_family", to_string(r.model_family)},
            {"model_version", r.model_version}};
  }

  HttpResult health() const { return {200, {{"status", "ok"}, {"model_version", version_}}}; }

  HttpResult schema_document() const { return {200, schema_.to_json()}; }

  HttpResult predict_request(std::string_view body) const {
    nlohmann::json req;
    try {
      req = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      return {400, error_body("malformed_json", "request body is not valid JSON", {{"error", e.what()}})};
    }
    if (!req.is_object() || !req.contains("selected_features") || !req["selected_features"].is_array())
      return {400, error_body("invalid_request", "expected {\"selected_features\": [feature ids]}")};
    std::vector<std::string> ids;
    for (const auto& v : req["selected_features"]) {
      if (!v.is_string()) return {400, error_body("invalid_request", "feature ids must be strings")};
      ids.push_back(v.get<std::string>());
    }
    for (const auto& id : ids) {
      if (!schema_.index_of(id))
        return {422, error_body("unknown_feature", "unknown feature id '" + id + "'", {{"feature", id}})};
    }
    return {200, to_json(predict(ids))};
  }

  HttpResult handle(std::string_view method, std::string_view path, std::string_view body) const {
    if (path == "/api/v1/health" && method == "GET") return health();
    if (path == "/api/v1/schema" && method == "GET") return schema_document();
    if (path == "/api/v1/predict" && method == "POST") return predict_request(body);
    if (path == "/api/v1/health" || path == "/api/v1/schema" || path == "/api/v1/predict")
      return {405, error_body("method_not_allowed", std::string(method) + " not allowed on " + std::string(path))};
    return {404, error_body("not_found", "no route for " + std::string(path))};
  }

private:
  FeatureSchema schema_;
  TrainedModel model_;
  std::string version_;
};

} // namespace aeroclass

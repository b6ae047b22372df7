#pragma once

#include <aeroclass/canonical_schema.hpp>
#include <aeroclass/error.hpp>

#include <json.hpp>

#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace aeroclass {

inline constexpr std::size_t kDataClassCount = 17;
inline constexpr std::size_t kFeatureCount = 61;

/// One occurrence encoded over the schema. Raw encodings are 0/1; SMOTE
/// synthetics may hold fractional values. Always finite and within [0, 1].
using FeatureVector = std::vector<double>;

struct FeatureDef {
  std::string id;
  std::string display_name;
  std::size_t vector_index = 0;
};

struct DataClass {
  std::string id;
  std::string display_name;
  std::vector<FeatureDef> features;
};

/// Ordered catalog of data classes and their features. Vector index i is
/// the i-th feature in document order (class order, then feature order).
/// Immutable once loaded.
class FeatureSchema {
public:
  const std::string& version() const noexcept { return version_; }
  const std::vector<DataClass>& classes() const noexcept { return classes_; }
  std::size_t size() const noexcept { return features_.size(); }

  const FeatureDef& feature(std::size_t index) const { return features_.at(index); }
  std::span<const FeatureDef> features() const noexcept { return features_; }

  std::optional<std::size_t> index_of(std::string_view id) const {
    const auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Document form, as served to clients (includes vector indices).
  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json doc;
    doc["version"] = version_;
    auto& classes = doc["classes"] = nlohmann::ordered_json::array();
    for (const auto& dc : classes_) {
      nlohmann::ordered_json c;
      c["id"] = dc.id;
      c["display_name"] = dc.display_name;
      auto& feats = c["features"] = nlohmann::ordered_json::array();
      for (const auto& f : dc.features) {
        feats.push_back({{"id", f.id}, {"display_name", f.display_name}, {"vector_index", f.vector_index}});
      }
      classes.push_back(std::move(c));
    }
    return doc;
  }

  friend bool operator==(const FeatureSchema& a, const FeatureSchema& b) {
    if (a.version_ != b.version_ || a.features_.size() != b.features_.size() ||
        a.classes_.size() != b.classes_.size())
      return false;
    for (std::size_t i = 0; i < a.classes_.size(); ++i) {
      if (a.classes_[i].id != b.classes_[i].id ||
          a.classes_[i].display_name != b.classes_[i].display_name)
        return false;
    }
    for (std::size_t i = 0; i < a.features_.size(); ++i) {
      if (a.features_[i].id != b.features_[i].id ||
          a.features_[i].display_name != b.features_[i].display_name)
        return false;
    }
    return true;
  }

private:
  friend FeatureSchema load_schema(std::string_view document);

  std::string version_;
  std::vector<DataClass> classes_;
  std::vector<FeatureDef> features_;
  std::unordered_map<std::string, std::size_t> index_;
};

namespace detail {

inline std::string require_string(const nlohmann::json& node, const char* key, const std::string& where) {
  if (!node.is_object() || !node.contains(key) || !node[key].is_string())
    throw ValidationError("schema: " + where + " is missing string field '" + key + "'");
  const auto value = node[key].get<std::string>();
  if (value.empty()) throw ValidationError("schema: " + where + " has empty '" + key + "'");
  return value;
}

} // namespace detail

/// Parses and validates a schema document:
///   { "version": "...", "classes": [ { "id", "display_name",
///     "features": [ { "id", "display_name" }, ... ] }, ... ] }
/// Throws ValidationError on malformed input, wrong class/feature counts or
/// duplicate ids (the message names the offending id).
inline FeatureSchema load_schema(std::string_view document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("schema: malformed document: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("schema: top level must be an object");

  FeatureSchema schema;
  schema.version_ = detail::require_string(doc, "version", "document");
  if (!doc.contains("classes") || !doc["classes"].is_array())
    throw ValidationError("schema: 'classes' must be a list");

  std::set<std::string> class_ids;
  for (const auto& node : doc["classes"]) {
    DataClass dc;
    dc.id = detail::require_string(node, "id", "data class");
    dc.display_name = detail::require_string(node, "display_name", "data class '" + dc.id + "'");
    if (!class_ids.insert(dc.id).second)
      throw ValidationError("schema: duplicate data class id '" + dc.id + "'");
    if (!node.contains("features") || !node["features"].is_array() || node["features"].empty())
      throw ValidationError("schema: data class '" + dc.id + "' has no features");
    for (const auto& fnode : node["features"]) {
      FeatureDef f;
      f.id = detail::require_string(fnode, "id", "feature in class '" + dc.id + "'");
      f.display_name = detail::require_string(fnode, "display_name", "feature '" + f.id + "'");
      f.vector_index = schema.features_.size();
      if (!schema.index_.emplace(f.id, f.vector_index).second)
        throw ValidationError("schema: duplicate feature id '" + f.id + "'");
      schema.features_.push_back(f);
      dc.features.push_back(std::move(f));
    }
    schema.classes_.push_back(std::move(dc));
  }

  if (schema.classes_.size() != kDataClassCount)
    throw ValidationError("schema: class count " + std::to_string(schema.classes_.size()) + " ≠ " +
                          std::to_string(kDataClassCount));
  if (schema.features_.size() != kFeatureCount)
    throw ValidationError("schema: feature count " + std::to_string(schema.features_.size()) + " ≠ " +
                          std::to_string(kFeatureCount));
  return schema;
}

/// The bundled schema (data/schema.json).
inline const FeatureSchema& canonical_schema() {
  static const FeatureSchema schema = load_schema(kCanonicalSchemaDocument);
  return schema;
}

/// Throws unless `v` has the schema's length and every value is finite and in [0, 1].
inline void validate_vector(const FeatureSchema& schema, std::span<const double> v) {
  if (v.size() != schema.size())
    throw ValidationError("feature vector has length " + std::to_string(v.size()) + ", expected " +
                          std::to_string(schema.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]) || v[i] < 0.0 || v[i] > 1.0)
      throw ValidationError("feature vector value at index " + std::to_string(i) + " (" + schema.feature(i).id +
                            ") is outside [0, 1]");
  }
}

template <typename Ids>
FeatureVector encode(const FeatureSchema& schema, const Ids& selected) {
  FeatureVector v(schema.size(), 0.0);
  for (const auto& id : selected) {
    const auto index = schema.index_of(id);
    if (!index) throw ValidationError("unknown feature id '" + std::string(id) + "'");
    v[*index] = 1.0;
  }
  return v;
}

inline FeatureVector encode(const FeatureSchema& schema, std::initializer_list<std::string_view> selected) {
  return encode<std::initializer_list<std::string_view>>(schema, selected);
}

/// Ids of the features whose value is at least `threshold`.
inline std::set<std::string> decode(const FeatureSchema& schema, std::span<const double> v, double threshold = 0.5) {
  std::set<std::string> ids;
  const auto n = std::min(v.size(), schema.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (v[i] >= threshold) ids.insert(schema.feature(i).id);
  }
  return ids;
}

} // namespace aeroclass

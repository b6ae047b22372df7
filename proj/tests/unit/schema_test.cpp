#include <aeroclass/canonical_schema.hpp>
#include <aeroclass/schema.hpp>

#include "support/generators.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

using namespace aeroclass;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json canonical_json() { return nlohmann::json::parse(kCanonicalSchemaDocument); }

std::string expect_validation_error(const std::string& document) {
  try {
    load_schema(document);
  } catch (const ValidationError& e) {
    return e.what();
  }
  ADD_FAILURE() << "document was accepted";
  return {};
}

} // namespace

TEST(Schema, CanonicalHasSeventeenClassesAndSixtyOneFeatures) {
  const auto& s = canonical_schema();
  EXPECT_EQ(s.classes().size(), 17u);
  EXPECT_EQ(s.size(), 61u);
  std::size_t per_class_total = 0;
  for (const auto& c : s.classes()) per_class_total += c.features.size();
  EXPECT_EQ(per_class_total, 61u);
}

TEST(Schema, IndicesFollowDocumentOrder) {
  const auto& s = canonical_schema();
  std::size_t i = 0;
  for (const auto& c : s.classes())
    for (const auto& f : c.features) {
      EXPECT_EQ(f.vector_index, i);
      EXPECT_EQ(s.feature(i).id, f.id);
      EXPECT_EQ(s.index_of(f.id), i);
      ++i;
    }
}

TEST(Schema, TableOneSpotChecks) {
  const auto& s = canonical_schema();
  EXPECT_EQ(s.classes().front().display_name, "Phase of flight");
  EXPECT_EQ(s.classes().back().display_name, "Incapacitation/Injuries");
  EXPECT_EQ(s.feature(*s.index_of("landing_phase")).display_name, "Landing Phase");
  EXPECT_EQ(s.feature(*s.index_of("excursion")).display_name, "Excursion");
  EXPECT_EQ(s.feature(*s.index_of("weather")).display_name, "Weather");
  // "Fuel System" appears under two classes; both are kept as distinct features.
  EXPECT_TRUE(s.index_of("fuel_system"));
  EXPECT_TRUE(s.index_of("fire_fuel_system"));
  EXPECT_NE(*s.index_of("fuel_system"), *s.index_of("fire_fuel_system"));
}

TEST(Schema, BundledFileMatchesEmbeddedDocument) {
  const auto file = read_file(std::string(AEROCLASS_SOURCE_DIR) + "/data/schema.json");
  EXPECT_EQ(file, std::string(kCanonicalSchemaDocument));
  EXPECT_EQ(load_schema(file), canonical_schema());
}

TEST(Schema, LoadingIsDeterministic) {
  EXPECT_EQ(load_schema(kCanonicalSchemaDocument), load_schema(kCanonicalSchemaDocument));
  EXPECT_EQ(canonical_schema().to_json().dump(), load_schema(kCanonicalSchemaDocument).to_json().dump());
}

TEST(Schema, RejectsSixtyFeatures) {
  auto doc = canonical_json();
  doc["classes"][0]["features"].erase(0);
  const auto msg = expect_validation_error(doc.dump());
  EXPECT_NE(msg.find("feature count 60 ≠ 61"), std::string::npos) << msg;
}

TEST(Schema, RejectsDuplicateFeatureId) {
  auto doc = canonical_json();
  doc["classes"][14]["features"][2]["id"] = "fuel_system";
  const auto msg = expect_validation_error(doc.dump());
  EXPECT_NE(msg.find("fuel_system"), std::string::npos) << msg;
  EXPECT_NE(msg.find("duplicate"), std::string::npos) << msg;
}

TEST(Schema, RejectsMalformedDocuments) {
  expect_validation_error("{");
  expect_validation_error("[]");
  expect_validation_error(R"({"version": "x"})");
  auto doc = canonical_json();
  doc["classes"][3]["features"][1].erase("display_name");
  expect_validation_error(doc.dump());
  auto extra = canonical_json();
  extra["classes"].push_back(extra["classes"][0]);
  expect_validation_error(extra.dump());
}

TEST(Encode, EmptySelectionIsAllZero) {
  const auto v = encode(canonical_schema(), std::vector<std::string>{});
  ASSERT_EQ(v.size(), 61u);
  for (double x : v) EXPECT_EQ(x, 0.0);
}

TEST(Encode, WorkedExampleSetsThreeOnes) {
  const auto& s = canonical_schema();
  const auto v = encode(s, {"landing_phase", "excursion", "weather"});
  ASSERT_EQ(v.size(), 61u);
  std::set<std::size_t> ones;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 1.0) ones.insert(i);
    else EXPECT_EQ(v[i], 0.0);
  }
  EXPECT_EQ(ones, (std::set<std::size_t>{*s.index_of("landing_phase"), *s.index_of("excursion"),
                                         *s.index_of("weather")}));
}

TEST(Encode, UnknownIdIsRejected) {
  try {
    encode(canonical_schema(), {"nonexistent_feature"});
    FAIL() << "accepted unknown id";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("nonexistent_feature"), std::string::npos);
  }
}

TEST(Decode, ZeroVectorIsEmpty) {
  EXPECT_TRUE(decode(canonical_schema(), FeatureVector(61, 0.0)).empty());
}

TEST(Decode, ThresholdAppliesPerIndex) {
  FeatureVector v(61, 0.0);
  v[3] = 0.7;
  EXPECT_EQ(decode(canonical_schema(), v), (std::set<std::string>{canonical_schema().feature(3).id}));
  v[3] = 0.49;
  EXPECT_TRUE(decode(canonical_schema(), v).empty());
}

TEST(Decode, RoundTripsRandomSelections) {
  gen::Engine e(101);
  const auto& s = canonical_schema();
  for (int trial = 0; trial < 500; ++trial) {
    const auto ids = gen::random_selection(e, gen::uniform(e));
    const auto v = encode(s, ids);
    double l1 = 0.0;
    for (double x : v) l1 += x;
    EXPECT_EQ(l1, static_cast<double>(ids.size()));
    EXPECT_EQ(decode(s, v), std::set<std::string>(ids.begin(), ids.end()));
  }
}

TEST(ValidateVector, ChecksLengthAndRange) {
  const auto& s = canonical_schema();
  EXPECT_NO_THROW(validate_vector(s, FeatureVector(61, 0.5)));
  EXPECT_THROW(validate_vector(s, FeatureVector(60, 0.0)), ValidationError);
  FeatureVector bad(61, 0.0);
  bad[10] = 1.5;
  EXPECT_THROW(validate_vector(s, bad), ValidationError);
}

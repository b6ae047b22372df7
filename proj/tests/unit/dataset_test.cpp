#include <aeroclass/dataset.hpp>

#include "support/generators.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

using namespace aeroclass;

namespace {

const FeatureSchema& schema() { return canonical_schema(); }

std::string header(bool with_id = true) {
  std::string h;
  for (const auto& f : schema().features()) h += f.id + ",";
  h += "label";
  if (with_id) h += ",record_id";
  return h + "\n";
}

std::string row(const std::vector<std::string>& ones, std::string_view label, std::string_view id = {}) {
  const auto v = encode(schema(), ones);
  std::string r;
  for (double x : v) r += x == 1.0 ? "1," : "0,";
  r += label;
  if (!id.empty()) r += "," + std::string(id);
  return r + "\n";
}

std::string load_error(const std::string& text) {
  try {
    load_dataset(text, schema());
  } catch (const ValidationError& e) {
    return e.what();
  }
  ADD_FAILURE() << "dataset accepted";
  return {};
}

// n_incident incident records followed by n_serious serious ones.
Dataset counted(std::size_t n_incident, std::size_t n_serious) {
  gen::Engine e(n_incident * 1000 + n_serious);
  return gen::random_dataset(e, n_incident, n_serious, kFeatureCount);
}

std::set<std::string> ids_of(const Dataset& d) {
  std::set<std::string> s;
  for (const auto& r : d.records) s.insert(r.record_id);
  return s;
}

} // namespace

TEST(LoadDataset, ReadsRecordsWithIdsAndLabels) {
  const auto text = header() + row({"landing_phase", "excursion", "weather"}, "serious_incident", "ev-1") +
                    row({}, "incident", "ev-2");
  const auto d = load_dataset(text, schema());
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d.schema_version, schema().version());
  EXPECT_EQ(d.records[0].record_id, "ev-1");
  EXPECT_EQ(d.records[0].label, Label::SeriousIncident);
  EXPECT_EQ(decode(schema(), d.records[0].features),
            (std::set<std::string>{"landing_phase", "excursion", "weather"}));
  EXPECT_EQ(d.records[1].label, Label::Incident);
}

TEST(LoadDataset, AcceptsPermutedColumnsAndMissingIds) {
  // Reverse the header and every row.
  std::vector<std::string> cols;
  for (const auto& f : schema().features()) cols.push_back(f.id);
  cols.push_back("label");
  std::reverse(cols.begin(), cols.end());
  std::string text;
  for (std::size_t i = 0; i < cols.size(); ++i) text += (i ? "," : "") + cols[i];
  text += "\n";
  const auto v = encode(schema(), {"egpws"});
  std::string r = "serious_incident";
  for (auto it = v.rbegin(); it != v.rend(); ++it) r += *it == 1.0 ? ",1" : ",0";
  text += r + "\n";
  const auto d = load_dataset(text, schema());
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d.records[0].record_id, "row-1");
  EXPECT_EQ(decode(schema(), d.records[0].features), (std::set<std::string>{"egpws"}));
}

TEST(LoadDataset, OutOfRangeCellNamesLineAndColumn) {
  auto bad = row({}, "incident", "x");
  bad[0] = '2';
  const auto msg = load_error(header() + row({}, "incident", "a") + bad);
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("column 1"), std::string::npos) << msg;
  EXPECT_NE(msg.find(schema().feature(0).id), std::string::npos) << msg;
}

TEST(LoadDataset, HeaderOnlyIsEmptyDataset) {
  const auto msg = load_error(header());
  EXPECT_NE(msg.find("empty dataset"), std::string::npos) << msg;
}

TEST(LoadDataset, RejectsStructuralProblems) {
  auto nonnumeric = row({}, "incident", "x");
  nonnumeric[0] = 'y';
  load_error(header() + nonnumeric);
  load_error(header() + row({}, "accident", "x"));
  load_error(header() + "0,1\n");
  load_error("bogus," + header() + "0," + row({}, "incident", "x"));
  std::string no_label = header(false);
  no_label.replace(no_label.find(",label"), 6, "");
  load_error(no_label);
  load_error("");
}

TEST(LoadDataset, WriteThenLoadRoundTrips) {
  gen::Engine e(8);
  auto d = gen::random_dataset(e, 30, 20, kFeatureCount);
  d.records[0].features[5] = 0.25;  // fractional values survive too
  std::ostringstream out;
  write_dataset(out, d, schema());
  const auto back = load_dataset(out.str(), schema());
  ASSERT_EQ(back.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_EQ(back.records[i].features, d.records[i].features);
    EXPECT_EQ(back.records[i].label, d.records[i].label);
    EXPECT_EQ(back.records[i].record_id, d.records[i].record_id);
  }
}

TEST(ClassCounts, CountsEachLabel) {
  const auto a = class_counts(counted(3, 2));
  EXPECT_EQ(a.incident, 3u);
  EXPECT_EQ(a.serious, 2u);
  const auto b = class_counts(counted(285, 190));
  EXPECT_EQ(b.incident, 285u);
  EXPECT_EQ(b.serious, 190u);
  EXPECT_EQ(b.total(), 475u);
  const auto c = class_counts(Dataset{});
  EXPECT_EQ(c.incident, 0u);
  EXPECT_EQ(c.serious, 0u);
}

TEST(StratifiedSplit, FullDatasetScaleArithmetic) {
  const auto d = counted(285, 190);
  // Oracle: round-half-up of 0.8 x class size.
  const auto oracle = [](std::size_t n) { return static_cast<std::size_t>(std::floor(0.8 * double(n) + 0.5)); };
  ASSERT_EQ(oracle(285), 228u);
  ASSERT_EQ(oracle(190), 152u);
  for (std::uint64_t seed : {0ull, 1ull, 42ull, 123456789ull}) {
    const auto s = stratified_split(d, 0.8, seed);
    const auto tr = class_counts(s.train);
    const auto te = class_counts(s.test);
    EXPECT_EQ(s.train.size(), 380u);
    EXPECT_EQ(s.test.size(), 95u);
    EXPECT_EQ(tr.incident, 228u);
    EXPECT_EQ(tr.serious, 152u);
    EXPECT_EQ(te.incident, 57u);
    EXPECT_EQ(te.serious, 38u);
  }
}

TEST(StratifiedSplit, HalfOfFourIsOneAndOne) {
  const auto s = stratified_split(counted(2, 2), 0.5, 3);
  EXPECT_EQ(class_counts(s.train).incident, 1u);
  EXPECT_EQ(class_counts(s.train).serious, 1u);
  EXPECT_EQ(class_counts(s.test).incident, 1u);
  EXPECT_EQ(class_counts(s.test).serious, 1u);
}

TEST(StratifiedSplit, DeterministicPerSeed) {
  const auto d = counted(60, 40);
  EXPECT_EQ(ids_of(stratified_split(d, 0.8, 77).train), ids_of(stratified_split(d, 0.8, 77).train));
  EXPECT_NE(ids_of(stratified_split(d, 0.8, 77).train), ids_of(stratified_split(d, 0.8, 78).train));
}

TEST(StratifiedSplit, PartitionsExactly) {
  gen::Engine e(4);
  for (int trial = 0; trial < 50; ++trial) {
    const auto ni = 2 + gen::index_below(e, 80);
    const auto ns = 2 + gen::index_below(e, 80);
    const double ratio = gen::uniform(e, 0.1, 0.9);
    const auto d = gen::random_dataset(e, ni, ns, 8);
    const auto s = stratified_split(d, ratio, e());
    const auto tr = ids_of(s.train), te = ids_of(s.test);
    std::set<std::string> both;
    std::set_intersection(tr.begin(), tr.end(), te.begin(), te.end(), std::inserter(both, both.end()));
    EXPECT_TRUE(both.empty());
    EXPECT_EQ(tr.size() + te.size(), d.size());
    // Per-class train share within one record of the overall proportion.
    const auto c = class_counts(s.train);
    EXPECT_LE(std::fabs(double(c.incident) - ratio * double(ni)), 1.0);
    EXPECT_LE(std::fabs(double(c.serious) - ratio * double(ns)), 1.0);
  }
}

TEST(StratifiedSplit, TwentySeedsGiveDistinctMemberships) {
  const auto d = counted(60, 40);
  std::set<std::set<std::string>> memberships;
  for (std::uint64_t seed = 0; seed < 20; ++seed) memberships.insert(ids_of(stratified_split(d, 0.8, seed).train));
  EXPECT_GE(memberships.size(), 19u);
}

TEST(StratifiedSplit, RejectsTinyClassesAndBadRatios) {
  EXPECT_THROW(stratified_split(counted(5, 1), 0.8, 0), ValidationError);
  EXPECT_THROW(stratified_split(counted(5, 5), 0.0, 0), ValidationError);
  EXPECT_THROW(stratified_split(counted(5, 5), 1.0, 0), ValidationError);
}

TEST(StratifiedSplit, UnstratifiedModeSplitsWholeDataset) {
  const auto s = stratified_split(counted(285, 190), 0.8, 9, false);
  EXPECT_EQ(s.train.size(), 380u);
  EXPECT_EQ(s.test.size(), 95u);
}

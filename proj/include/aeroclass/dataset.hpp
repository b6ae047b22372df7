#pragma once

#include <aeroclass/error.hpp>
#include <aeroclass/rng.hpp>
#include <aeroclass/schema.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace aeroclass {

/// SeriousIncident is the positive class throughout.
enum class Label : std::uint8_t { Incident = 0, SeriousIncident = 1 };

inline std::string_view to_string(Label label) noexcept {
  return label == Label::SeriousIncident ? "serious_incident" : "incident";
}

inline std::string_view display_name(Label label) noexcept {
  return label == Label::SeriousIncident ? "Serious Incident" : "Incident";
}

inline Label parse_label(std::string_view text) {
  if (text == "incident") return Label::Incident;
  if (text == "serious_incident") return Label::SeriousIncident;
  throw ValidationError("unknown label '" + std::string(text) + "' (expected incident | serious_incident)");
}

struct LabeledRecord {
  FeatureVector features;
  Label label = Label::Incident;
  std::string record_id;

  friend bool operator==(const LabeledRecord&, const LabeledRecord&) = default;
};

struct Dataset {
  std::vector<LabeledRecord> records;
  std::string schema_version;

  std::size_t size() const noexcept { return records.size(); }
  bool empty() const noexcept { return records.empty(); }
  std::size_t dim() const noexcept { return records.empty() ? 0 : records.front().features.size(); }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct ClassCounts {
  std::size_t incident = 0;
  std::size_t serious = 0;

  std::size_t total() const noexcept { return incident + serious; }
  std::size_t of(Label l) const noexcept { return l == Label::SeriousIncident ? serious : incident; }

  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

inline ClassCounts class_counts(std::span<const LabeledRecord> records) noexcept {
  ClassCounts c;
  for (const auto& r : records) (r.label == Label::SeriousIncident ? c.serious : c.incident)++;
  return c;
}

inline ClassCounts class_counts(const Dataset& d) noexcept { return class_counts(d.records); }

namespace detail {

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  for (auto& c : cells) {
    while (!c.empty() && (c.front() == ' ' || c.front() == '\t')) c.remove_prefix(1);
    while (!c.empty() && (c.back() == ' ' || c.back() == '\t' || c.back() == '\r')) c.remove_suffix(1);
  }
  return cells;
}

} // namespace detail

/// Reads the comma-separated dataset format: a header of schema feature ids
/// plus `label` (and optionally `record_id`) in any column order, then one
/// record per line. Rows without a record_id column get "row-<n>" ids, where
/// n is the 1-based data row number. Errors name the line and column.
inline Dataset load_dataset(std::istream& in, const FeatureSchema& schema) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  };

  if (!next_line()) throw ValidationError("dataset: missing header row");
  std::vector<std::string> header;
  for (const auto cell : detail::split_csv_line(line)) header.emplace_back(cell);
  std::vector<std::size_t> column_feature(header.size(), SIZE_MAX);
  std::vector<bool> seen(schema.size(), false);
  std::size_t label_col = SIZE_MAX, id_col = SIZE_MAX;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto& name = header[c];
    if (name == "label") {
      if (label_col != SIZE_MAX) throw ValidationError("dataset: duplicate column 'label'");
      label_col = c;
    } else if (name == "record_id") {
      if (id_col != SIZE_MAX) throw ValidationError("dataset: duplicate column 'record_id'");
      id_col = c;
    } else if (const auto idx = schema.index_of(name)) {
      if (seen[*idx]) throw ValidationError("dataset: duplicate column '" + name + "'");
      seen[*idx] = true;
      column_feature[c] = *idx;
    } else {
      throw ValidationError("dataset: unknown column '" + name + "' (header column " +
                            std::to_string(c + 1) + ")");
    }
  }
  if (label_col == SIZE_MAX) throw ValidationError("dataset: missing 'label' column");
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (!seen[i]) throw ValidationError("dataset: missing feature column '" + schema.feature(i).id + "'");
  }

  Dataset d;
  d.schema_version = schema.version();
  std::size_t row = 0;
  while (next_line()) {
    ++row;
    const auto cells = detail::split_csv_line(line);
    const auto where = [&](std::size_t c) {
      return "line " + std::to_string(line_no) + ", column " + std::to_string(c + 1) + " ('" + header[c] + "')";
    };
    if (cells.size() != header.size())
      throw ValidationError("dataset: line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                            " cells, expected " + std::to_string(header.size()));
    LabeledRecord rec;
    rec.features.assign(schema.size(), 0.0);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto cell = cells[c];
      if (c == label_col) {
        if (cell.empty()) throw ValidationError("dataset: missing label at " + where(c));
        try {
          rec.label = parse_label(cell);
        } catch (const ValidationError& e) {
          throw ValidationError("dataset: " + std::string(e.what()) + " at " + where(c));
        }
      } else if (c == id_col) {
        rec.record_id = std::string(cell);
      } else {
        double value = 0.0;
        const auto* first = cell.data();
        const auto* last = cell.data() + cell.size();
        const auto [ptr, ec] = std::from_chars(first, last, value);
        if (cell.empty() || ec != std::errc{} || ptr != last)
          throw ValidationError("dataset: non-numeric value '" + std::string(cell) + "' at " + where(c));
        if (!std::isfinite(value) || value < 0.0 || value > 1.0)
          throw ValidationError("dataset: value " + std::string(cell) + " outside [0, 1] at " + where(c));
        rec.features[column_feature[c]] = value;
      }
    }
    if (rec.record_id.empty()) rec.record_id = "row-" + std::to_string(row);
    d.records.push_back(std::move(rec));
  }
  if (d.records.empty()) throw ValidationError("dataset: empty dataset");
  return d;
}

inline Dataset load_dataset(std::string_view text, const FeatureSchema& schema) {
  std::istringstream in{std::string(text)};
  return load_dataset(in, schema);
}

/// Writes the dataset in the same format load_dataset reads, with columns in
/// schema order followed by label and record_id.
inline void write_dataset(std::ostream& out, const Dataset& d, const FeatureSchema& schema) {
  for (const auto& f : schema.features()) out << f.id << ',';
  out << "label,record_id\n";
  char buf[32];
  for (const auto& r : d.records) {
    for (double v : r.features) {
      const auto res = std::to_chars(buf, buf + sizeof buf, v);
      out.write(buf, res.ptr - buf);
      out << ',';
    }
    out << to_string(r.label) << ',' << r.record_id << '\n';
  }
}

struct SplitPair {
  Dataset train;
  Dataset test;
  std::uint64_t seed = 0;
  double ratio = 0.8;
};

/// Number of records a group of `n` contributes to the training side:
/// round-half-up of ratio * n.
inline std::size_t train_share(std::size_t n, double ratio) noexcept {
  return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 0.5));
}

/// Seeded train/test partition. With `stratified` each class is shuffled
/// separately (incident first, then serious, from one generator) and
/// contributes train_share(class size) records to train; otherwise the whole
/// dataset is shuffled once. Both sides keep the input's record order.
inline SplitPair stratified_split(const Dataset& d, double ratio, std::uint64_t seed, bool stratified = true) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw ValidationError("split: ratio must lie in (0, 1)");
  std::vector<bool> in_train(d.size(), false);
  SplitMix64 rng(seed);

  auto take = [&](std::vector<std::size_t>& idx) {
    rng.shuffle(std::span(idx));
    const auto n_train = train_share(idx.size(), ratio);
    for (std::size_t i = 0; i < n_train; ++i) in_train[idx[i]] = true;
  };

  if (stratified) {
    std::vector<std::size_t> incident, serious;
    for (std::size_t i = 0; i < d.size(); ++i)
      (d.records[i].label == Label::SeriousIncident ? serious : incident).push_back(i);
    if (incident.size() < 2 || serious.size() < 2)
      throw ValidationError("split: each class needs at least 2 records (incident " + std::to_string(incident.size()) +
                            ", serious_incident " + std::to_string(serious.size()) + ")");
    take(incident);
    take(serious);
  } else {
    if (d.size() < 2) throw ValidationError("split: need at least 2 records");
    std::vector<std::size_t> all(d.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    take(all);
  }

  SplitPair out;
  out.seed = seed;
  out.ratio = ratio;
  out.train.schema_version = out.test.schema_version = d.schema_version;
  for (std::size_t i = 0; i < d.size(); ++i) (in_train[i] ? out.train : out.test).records.push_back(d.records[i]);
  return out;
}

} // namespace aeroclass

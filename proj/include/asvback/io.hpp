// asvback/io.hpp

// Copyright 2026  The asvback Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Text formats. Every file is UTF-8 with LF line endings, fields are
// separated by a single TAB and vector components by a single space.
// Floats are written in the shortest form that parses back to the same
// double, and parsed with std::from_chars, so nothing here depends on the
// C locale.
//
//   embeddings     dim<TAB>D, then  id<TAB>v1 v2 ... vD
//   trials         enroll<TAB>test[<TAB>target|nontarget]
//   quality table  name<TAB>table-name, then  utt<TAB>value
//   scores         enroll<TAB>test<TAB>score
//   model          key<TAB>value
//   cohort stats   id<TAB>mean<TAB>std
//   enroll map     speaker<TAB>utt1,utt2,...
//   qmf matrix     features<TAB>name1 name2 ..., then  enroll<TAB>test<TAB>f1 f2 ...

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <utility>
#include <vector>

#include "asvback/core.hpp"
#include "asvback/error.hpp"

namespace asvback {

// ---------------------------------------------------------------------------
// Value types

enum class Label : std::uint8_t { nontarget = 0, target = 1 };

inline std::string_view to_string(Label l) {
  return l == Label::target ? "target" : "nontarget";
}

/// Ordered, id-indexed collection of equal-dimension embeddings.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;
  explicit EmbeddingStore(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw DataError("embedding dimension must be positive");
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<Embedding>& entries() const { return entries_; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  void add(Embedding e) {
    if (dim_ == 0) {
      if (e.values.empty()) throw DataError("embedding dimension must be positive");
      dim_ = e.values.size();
    }
    if (e.values.size() != dim_)
      throw DataError("embedding '" + e.id + "' has dimension " +
                      std::to_string(e.values.size()) + ", store has " +
                      std::to_string(dim_));
    if (!all_finite(e.values))
      throw DataError("embedding '" + e.id + "' has a non-finite value");
    if (index_.count(e.id)) throw DataError("duplicate embedding id '" + e.id + "'");
    index_.emplace(e.id, entries_.size());
    entries_.push_back(std::move(e));
  }

  /// Appends every entry of `other`; ids must stay unique.
  void merge(const EmbeddingStore& other) {
    for (const auto& e : other) add(e);
  }

  const Embedding* find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &entries_[it->second];
  }

  const Embedding& at(std::string_view id) const {
    if (const auto* e = find(id)) return *e;
    throw DataError("unknown embedding id '" + std::string(id) + "'");
  }

  bool operator==(const EmbeddingStore& o) const {
    return dim_ == o.dim_ && entries_ == o.entries_;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<Embedding> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct Trial {
  std::string enroll_id;
  std::string test_id;
  std::optional<Label> label;

  bool operator==(const Trial&) const = default;
};

struct TrialList {
  std::vector<Trial> entries;

  std::size_t size() const { return entries.size(); }
  bool labeled() const { return !entries.empty() && entries.front().label.has_value(); }

  std::vector<Label> labels() const {
    std::vector<Label> out;
    out.reserve(entries.size());
    for (const auto& t : entries) {
      if (!t.label) throw DataError("trial list is not labeled");
      out.push_back(*t.label);
    }
    return out;
  }

  bool operator==(const TrialList&) const = default;
};

/// Named per-utterance scalar table (VAD durations in seconds, etc).
class QualityTable {
 public:
  QualityTable() = default;
  explicit QualityTable(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  std::size_t size() const { return entries_.size(); }
  const std::vector<std::pair<std::string, double>>& entries() const { return entries_; }

  void add(std::string id, double value) {
    if (!std::isfinite(value)) throw DataError("quality table '" + name_ + "': non-finite value for '" + id + "'");
    if (index_.count(id)) throw DataError("quality table '" + name_ + "': duplicate id '" + id + "'");
    index_.emplace(id, entries_.size());
    entries_.emplace_back(std::move(id), value);
  }

  std::optional<double> find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return entries_[it->second].second;
  }

  double at(std::string_view id) const {
    if (auto v = find(id)) return *v;
    throw DataError("quality table '" + name_ + "' has no entry for '" + std::string(id) + "'");
  }

  bool operator==(const QualityTable& o) const {
    return name_ == o.name_ && entries_ == o.entries_;
  }

 private:
  std::string name_;
  std::vector<std::pair<std::string, double>> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct ScoreEntry {
  std::string enroll_id;
  std::string test_id;
  double score = 0.0;

  bool operator==(const ScoreEntry&) const = default;
};

struct ScoreFile {
  std::vector<ScoreEntry> entries;

  std::size_t size() const { return entries.size(); }
  std::vector<double> scores() const {
    std::vector<double> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.score);
    return out;
  }
  bool operator==(const ScoreFile&) const = default;
};

/// Ordered `key value` pairs with numeric values (TAS-Norm parameters,
/// fusion models).
struct ModelFile {
  std::vector<std::pair<std::string, double>> entries;

  void set(std::string key, double value) { entries.emplace_back(std::move(key), value); }

  std::optional<double> find(std::string_view key) const {
    for (const auto& [k, v] : entries)
      if (k == key) return v;
    return std::nullopt;
  }

  double at(std::string_view key) const {
    if (auto v = find(key)) return *v;
    throw DataError("model file has no key '" + std::string(key) + "'");
  }

  bool operator==(const ModelFile&) const = default;
};

/// Mean and standard deviation of the top-K cohort scores of one
/// utterance or speaker.
struct CohortStats {
  std::string id;
  double mean = 0.0;
  double std = 0.0;

  bool operator==(const CohortStats&) const = default;
};

class CohortStatsTable {
 public:
  std::size_t size() const { return entries_.size(); }
  const std::vector<CohortStats>& entries() const { return entries_; }

  void add(CohortStats s) {
    if (!std::isfinite(s.mean) || !std::isfinite(s.std))
      throw DataError("cohort stats for '" + s.id + "' are not finite");
    if (index_.count(s.id)) throw DataError("duplicate cohort stats id '" + s.id + "'");
    index_.emplace(s.id, entries_.size());
    entries_.push_back(std::move(s));
  }

  const CohortStats* find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &entries_[it->second];
  }

  const CohortStats& at(std::string_view id) const {
    if (const auto* s = find(id)) return *s;
    throw DataError("no cohort stats for '" + std::string(id) + "'");
  }

  bool operator==(const CohortStatsTable& o) const { return entries_ == o.entries_; }

 private:
  std::vector<CohortStats> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct EnrollEntry {
  std::string speaker_id;
  std::vector<std::string> utterance_ids;

  bool operator==(const EnrollEntry&) const = default;
};

struct EnrollMap {
  std::vector<EnrollEntry> entries;
  bool operator==(const EnrollMap&) const = default;
};

struct QmfRow {
  std::string enroll_id;
  std::string test_id;
  Vector values;

  bool operator==(const QmfRow&) const = default;
};

/// Per-trial quality features, one row per trial, columns named.
struct QmfMatrix {
  std::vector<std::string> names;
  std::vector<QmfRow> rows;

  bool operator==(const QmfMatrix&) const = default;
};

// ---------------------------------------------------------------------------
// Float formatting

inline std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace detail {

/// Line-oriented reader that knows where it is, for error messages.
class LineSource {
 public:
  LineSource(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_no_;
    if (line.empty()) fail("empty line");
    return true;
  }

  [[noreturn]] void fail(const std::string& reason) const {
    throw DataError(name_ + ":" + std::to_string(line_no_) + ": " + reason);
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::istream& in_;
  std::string name_;
  std::size_t line_no_ = 0;
};

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::optional<double> parse_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline double parse_double_or_fail(const LineSource& src, std::string_view s, std::string_view what) {
  if (auto v = parse_double(s)) return *v;
  src.fail("invalid " + std::string(what) + " '" + std::string(s) + "'");
}

inline std::vector<std::string_view> fields(const LineSource& src, std::string_view line,
                                            std::size_t min_n, std::size_t max_n) {
  auto f = split(line, '\t');
  if (f.size() < min_n || f.size() > max_n) {
    src.fail("expected " + (min_n == max_n ? std::to_string(min_n)
                                           : std::to_string(min_n) + "-" + std::to_string(max_n)) +
             " tab-separated fields, got " + std::to_string(f.size()));
  }
  for (auto x : f)
    if (x.empty()) src.fail("empty field");
  return f;
}

inline void check_id(std::string_view id, std::string_view what) {
  if (id.empty()) throw DataError(std::string(what) + " id is empty");
  if (id.find_first_of("\t\n\r") != std::string_view::npos)
    throw DataError(std::string(what) + " id '" + std::string(id) + "' contains a tab or newline");
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  return out;
}

inline void finish(std::ostream& out, const std::string& path) {
  out.flush();
  if (!out) throw DataError("write to '" + path + "' failed");
}

inline void write_vector(std::ostream& out, ConstVectorView v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out << ' ';
    out << format_double(v[i]);
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Embedding store

inline EmbeddingStore parse_embeddings(std::istream& in, const std::string& name) {
  detail::LineSource src(in, name);
  std::string line;
  if (!src.next(line)) src.fail("missing 'dim' header");
  auto header = detail::fields(src, line, 2, 2);
  if (header[0] != "dim") src.fail("expected 'dim' header");
  std::size_t dim = 0;
  {
    auto h = header[1];
    auto [ptr, ec] = std::from_chars(h.data(), h.data() + h.size(), dim);
    if (ec != std::errc() || ptr != h.data() + h.size() || dim == 0)
      src.fail("invalid dimension '" + std::string(h) + "'");
  }
  EmbeddingStore store(dim);
  while (src.next(line)) {
    auto f = detail::fields(src, line, 2, 2);
    auto comps = detail::split(f[1], ' ');
    if (comps.size() != dim)
      src.fail("expected " + std::to_string(dim) + " values, got " + std::to_string(comps.size()));
    Embedding e{std::string(f[0]), {}};
    e.values.reserve(dim);
    for (auto c : comps) e.values.push_back(detail::parse_double_or_fail(src, c, "value"));
    try {
      store.add(std::move(e));
    } catch (const DataError& err) {
      src.fail(err.what());
    }
  }
  return store;
}

inline void format_embeddings(std::ostream& out, const EmbeddingStore& store) {
  if (store.dim() == 0) throw DataError("cannot write an embedding store without a dimension");
  out << "dim\t" << store.dim() << '\n';
  for (const auto& e : store) {
    detail::check_id(e.id, "embedding");
    out << e.id << '\t';
    detail::write_vector(out, e.values);
    out << '\n';
  }
}

inline EmbeddingStore read_embeddings(const std::string& path) {
  auto in = detail::open_in(path);
  return parse_embeddings(in, path);
}

inline void write_embeddings(const std::string& path, const EmbeddingStore& store) {
  auto out = detail::open_out(path);
  format_embeddings(out, store);
  detail::finish(out, path);
}

// ---------------------------------------------------------------------------
// Trials

inline TrialList parse_trials(std::istream& in, const std::string& name) {
  detail::LineSource src(in, name);
  TrialList list;
  std::string line;
  std::optional<bool> labeled;
  while (src.next(line)) {
    auto f = detail::fields(src, line, 2, 3);
    const bool has_label = f.size() == 3;
    if (!labeled) labeled = has_label;
    if (*labeled != has_label) src.fail("mixed labeled and unlabeled trials");
    Trial t{std::string(f[0]), std::string(f[1]), std::nullopt};
    if (has_label) {
      if (f[2] == "target") t.label = Label::target;
      else if (f[2] == "nontarget") t.label = Label::nontarget;
      else src.fail("invalid label '" + std::string(f[2]) + "'");
    }
    list.entries.push_back(std::move(t));
  }
  return list;
}

inline void format_trials(std::ostream& out, const TrialList& list) {
  const bool labeled = list.labeled();
  for (const auto& t : list.entries) {
    detail::check_id(t.enroll_id, "enroll");
    detail::check_id(t.test_id, "test");
    if (t.label.has_value() != labeled) throw DataError("mixed labeled and unlabeled trials");
    out << t.enroll_id << '\t' << t.test_id;
    if (t.label) out << '\t' << to_string(*t.label);
    out << '\n';
  }
}

inline TrialList read_trials(const std::string& path) {
  auto in = detail::open_in(path);
  return parse_trials(in, path);
}

inline void write_trials(const std::string& path, const TrialList& list) {
  auto out = detail::open_out(path);
  format_trials(out, list);
  detail::finish(out, path);
}

// ---------------------------------------------------------------------------
// Quality tables

inline QualityTable parse_quality_table(std::istream& in, const std::string& name) {
  detail::LineSource src(in, name);
  std::string line;
  if (!src.next(line)) src.fail("missing 'name' header");
  auto header = detail::fields(src, line, 2, 2);
  if (header[0] != "name") src.fail("expected 'name' header");
  QualityTable table{std::string(header[1])};
  while (src.next(line)) {
    auto f = detail::fields(src, line, 2, 2);
    double v = detail::parse_double_or_fail(src, f[1], "value");
    try {
      table.add(std::string(f[0]), v);
    } catch (const DataError& err) {
      src.fail(err.what());
    }
  }
  return table;
}

inline void format_quality_table(std::ostream& out, const QualityTable& table) {
  detail::check_id(table.name(), "table");
  out << "name\t" << table.name() << '\n';
  for (const auto& [id, v] : table.entries()) {
    detail::check_id(id, "utterance");
    out << id << '\t' << format_double(v) << '\n';
  }
}

inline QualityTable read_quality_table(const std::string& path) {
  auto in = detail::open_in(path);
  return parse_quality_table(in, path);
}

inline void write_quality_table(const std::string& path, const QualityTable& table) {
  auto out = detail::open_out(path);
  format_quality_table(out, table);
  detail::finish(out, path);
}

// ---------------------------------------------------------------------------
// Scores

inline ScoreFile parse_scores(std::istream& in, const std::string& name) {
  detail::LineSource src(in, name);
  ScoreFile file;
  std::string line;
  while (src.next(line)) {
    auto f = detail::fields(src, line, 3, 3);
    file.entries.push_back({std::string(f[0]), std::string(f[1]),
                            detail::parse_double_or_fail(src, f[2], "score")});
  }
  return file;
}

inline void format_scores(std::ostream& out, const ScoreFile& file) {
  for (const auto& e : file.entries) {
    detail::check_id(e.enroll_id, "enroll");
    detail::check_id(e.test_id, "test");
    if (!std::isfinite(e.score))
      throw NumericError("non-finite score for trial " + e.enroll_id + " " + e.test_id);
    out << e.enroll_id << '\t' << e.test_id << '\t' << format_double(e.score) << '\n';
  }
}

inline ScoreFile read_scores(const std::string& path) {
  auto in = detail::open_in(path);
  return parse_scores(in, path);
}

inline void write_scores(const std::string& path, const ScoreFile& file) {
  auto out = detail::open_out(path);
  format_scores(out, file);
  detail::finish(out, path);
}

// ---------------------------------------------------------------------------
// Model files

inline ModelFile parse_model(std::istream& in, const std::string& name) {
  detail::LineSource src(in, name);
  ModelFile model;
  std::string line;
  while (src.next(line)) {
    auto f = detail::fields(src, line, 2, 2);
    if (model.find(f[0])) src.fail("duplicate key '" + std::string(f[0]) + "'");
    model.set(std::string(f[0]), detail::parse_double_or_fail(src, f[1], "value"));
  }
  return model;
}

inline void format_model(std::ostream& out, const ModelFile& model) {
  for (const auto& [k, v] : model.entries) {
    detail::check_id(k, "key");
    if (!std::isfinite(v)) throw NumericError("model key '" + k + "' is not finite");
    out << k << '\t' << format_double(v) << '\n';
  }
}

inline ModelFile read_model(const std::string& path) {
  auto in = detail::open_in(path);
  return parse_model(in, path);
}

inline void write_model(const std::string& path, const ModelFile& model) {
  auto out = detail::open_out(path);
  format_model(out, model);
  detail::finish(out, path);
}

/// `key<TAB>value` lines with free-form string values (configs, plans).
inline std::vector<std::pair<std::string, std::string>> read_key_values(const std::string& path) {
  auto in = detail::open_in(path);
  detail::LineSource src(in, path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  while (src.next(line)) {
    auto f = detail::fields(src, line, 2, 2);
    out.emplace_back(std::string(f[0]), std::string(f[1]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cohort stats

inline CohortStatsTable parse_cohort_stats(std::istream& in, const std::string& name) {
  detail::LineSource src(in, name);
  CohortStatsTable table;
  std::string line;
  while (src.next(line)) {
    auto f = detail::fields(src, line, 3, 3);
    CohortStats s{std::string(f[0]), detail::parse_double_or_fail(src, f[1], "mean"),
                  detail::parse_double_or_fail(src, f[2], "std")};
    try {
      table.add(std::move(s));
    } catch (const DataError& err) {
      src.fail(err.what());
    }
  }
  return table;
}

inline void format_cohort_stats(std::ostream& out, const CohortStatsTable& table) {
  for (const auto& s : table.entries()) {
    detail::check_id(s.id, "cohort stats");
    out << s.id << '\t' << format_double(s.mean) << '\t' << format_double(s.std) << '\n';
  }
}

inline CohortStatsTable read_cohort_stats(const std::string& path) {
  auto in = detail::open_in(path);
  return parse_cohort_stats(in, path);
}

inline void write_cohort_stats(const std::string& path, const CohortStatsTable& table) {
  auto out = detail::open_out(path);
  format_cohort_stats(out, table);
  detail::finish(out, path);
}

// ---------------------------------------------------------------------------
// Enrollment map

inline EnrollMap parse_enroll_map(std::istream& in, const std::string& name) {
  detail::LineSource src(in, name);
  EnrollMap map;
  std::unordered_map<std::string, std::size_t> seen;
  std::string line;
  while (src.next(line)) {
    auto f = detail::fields(src, line, 2, 2);
    EnrollEntry e{std::string(f[0]), {}};
    if (!seen.emplace(e.speaker_id, map.entries.size()).second)
      src.fail("duplicate speaker '" + e.speaker_id + "'");
    for (auto u : detail::split(f[1], ',')) {
      if (u.empty()) src.fail("empty utterance id");
      e.utterance_ids.emplace_back(u);
    }
    map.entries.push_back(std::move(e));
  }
  return map;
}

inline void format_enroll_map(std::ostream& out, const EnrollMap& map) {
  for (const auto& e : map.entries) {
    detail::check_id(e.speaker_id, "speaker");
    if (e.utterance_ids.empty()) throw DataError("speaker '" + e.speaker_id + "' has no utterances");
    out << e.speaker_id << '\t';
    for (std::size_t i = 0; i < e.utterance_ids.size(); ++i) {
      const auto& u = e.utterance_ids[i];
      detail::check_id(u, "utterance");
      if (u.find(',') != std::string::npos)
        throw DataError("utterance id '" + u + "' contains a comma");
      if (i) out << ',';
      out << u;
    }
    out << '\n';
  }
}

inline EnrollMap read_enroll_map(const std::string& path) {
  auto in = detail::open_in(path);
  return parse_enroll_map(in, path);
}

inline void write_enroll_map(const std::string& path, const EnrollMap& map) {
  auto out = detail::open_out(path);
  format_enroll_map(out, map);
  detail::finish(out, path);
}

// ---------------------------------------------------------------------------
// QMF matrix

inline QmfMatrix parse_qmf_matrix(std::istream& in, const std::string& name) {
  detail::LineSource src(in, name);
  QmfMatrix m;
  std::string line;
  if (!src.next(line)) src.fail("missing 'features' header");
  auto header = detail::split(line, '\t');
  if (header[0] != "features" || header.size() > 2) src.fail("expected 'features' header");
  if (header.size() == 2) {
    for (auto n : detail::split(header[1], ' ')) {
      if (n.empty()) src.fail("empty feature name");
      for (const auto& existing : m.names)
        if (existing == n) src.fail("duplicate feature name '" + std::string(n) + "'");
      m.names.emplace_back(n);
    }
  }
  while (src.next(line)) {
    auto f = detail::fields(src, line, m.names.empty() ? 2 : 3, m.names.empty() ? 2 : 3);
    QmfRow row{std::string(f[0]), std::string(f[1]), {}};
    if (!m.names.empty()) {
      auto comps = detail::split(f[2], ' ');
      if (comps.size() != m.names.size())
        src.fail("expected " + std::to_string(m.names.size()) + " values, got " +
                 std::to_string(comps.size()));
      for (auto c : comps) row.values.push_back(detail::parse_double_or_fail(src, c, "value"));
    }
    m.rows.push_back(std::move(row));
  }
  return m;
}

inline void format_qmf_matrix(std::ostream& out, const QmfMatrix& m) {
  out << "features";
  for (std::size_t i = 0; i < m.names.size(); ++i) {
    const auto& n = m.names[i];
    detail::check_id(n, "feature");
    if (n.find(' ') != std::string::npos) throw DataError("feature name '" + n + "' contains a space");
    out << (i ? ' ' : '\t') << n;
  }
  out << '\n';
  for (const auto& r : m.rows) {
    detail::check_id(r.enroll_id, "enroll");
    detail::check_id(r.test_id, "test");
    if (r.values.size() != m.names.size()) throw DataError("qmf row width does not match header");
    if (!all_finite(r.values))
      throw NumericError("non-finite qmf value for trial " + r.enroll_id + " " + r.test_id);
    out << r.enroll_id << '\t' << r.test_id;
    if (!m.names.empty()) {
      out << '\t';
      detail::write_vector(out, r.values);
    }
    out << '\n';
  }
}

inline QmfMatrix read_qmf_matrix(const std::string& path) {
  auto in = detail::open_in(path);
  return parse_qmf_matrix(in, path);
}

inline void write_qmf_matrix(const std::string& path, const QmfMatrix& m) {
  auto out = detail::open_out(path);
  format_qmf_matrix(out, m);
  detail::finish(out, path);
}

}  // namespace asvback

// asvback/calibration.hpp

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

// Quality-aware calibration. Each trial gets a vector of quality measures
// (embedding norms and spread, cohort statistics, per-utterance tables
// such as VAD durations) and the fused score is linear in the system
// scores and the quality measures:
//
//   S_fusion = sum_k x_k S_k + sum_n y_n Q_n + bias
//
// Weights are fitted by logistic regression; the fused score is reported
// as the logit, not the probability.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "asvback/core.hpp"
#include "asvback/error.hpp"
#include "asvback/io.hpp"
#include "asvback/normalization.hpp"
#include "asvback/scoring.hpp"

namespace asvback {

// ---------------------------------------------------------------------------
// Quality measures

struct QmfVector {
  std::vector<std::string> names;
  Vector values;
};

/// Everything needed to compute the quality measures of a trial.
struct QmfContext {
  const EmbeddingStore* embeddings = nullptr;
  const PrototypeMap* prototypes = nullptr;
  const CohortStatsTable* enroll_stats = nullptr;
  const CohortStatsTable* test_stats = nullptr;
  std::optional<TasNormParams> tas_params;
  std::vector<QualityTable> quality_tables;
};

/// Feature names in extraction order: per side (enroll, then test)
/// l1, l2, std, as_mean, as_std, tas_mean, tas_std, then qt.<table>.
/// The tas_* features are present only when TAS-Norm parameters are.
inline std::vector<std::string> qmf_names(const QmfContext& ctx) {
  std::vector<std::string> names;
  for (std::string_view side : {"enroll", "test"}) {
    const std::string pre = std::string(side) + ".";
    for (const char* f : {"l1", "l2", "std", "as_mean", "as_std"}) names.push_back(pre + f);
    if (ctx.tas_params) {
      names.push_back(pre + "tas_mean");
      names.push_back(pre + "tas_std");
    }
    for (const auto& t : ctx.quality_tables) names.push_back(pre + "qt." + t.name());
  }
  return names;
}

namespace detail {

inline void append_side(Vector& out, ConstVectorView embedding, const CohortStats& stats,
                        const QmfContext& ctx) {
  const auto ds = dim_stats(embedding);
  out.insert(out.end(), {ds.l1, ds.l2, ds.std, stats.mean, stats.std});
  if (ctx.tas_params) {
    out.push_back(ctx.tas_params->calibrated_mean(stats.mean));
    out.push_back(ctx.tas_params->calibrated_std(stats.std));
  }
}

}  // namespace detail

/// Quality measures of one trial. The enroll side uses the speaker
/// prototype; its quality-table value is the mean over the speaker's
/// enrollment utterances.
inline QmfVector extract_qmf(const Trial& trial, const QmfContext& ctx) {
  if (!ctx.embeddings || !ctx.prototypes || !ctx.enroll_stats || !ctx.test_stats)
    throw DataError("incomplete QMF context");
  auto p = ctx.prototypes->find(trial.enroll_id);
  if (p == ctx.prototypes->end())
    throw DataError("no prototype for enrollment speaker '" + trial.enroll_id + "'");
  const auto& test = ctx.embeddings->at(trial.test_id);

  QmfVector q{qmf_names(ctx), {}};
  q.values.reserve(q.names.size());

  detail::append_side(q.values, p->second.vector, ctx.enroll_stats->at(trial.enroll_id), ctx);
  for (const auto& t : ctx.quality_tables) {
    double acc = 0.0;
    for (const auto& [utt, w] : p->second.weights) {
      (void)w;
      acc += t.at(utt);
    }
    q.values.push_back(acc / static_cast<double>(p->second.weights.size()));
  }

  detail::append_side(q.values, test.values, ctx.test_stats->at(trial.test_id), ctx);
  for (const auto& t : ctx.quality_tables) q.values.push_back(t.at(trial.test_id));
  return q;
}

inline QmfMatrix extract_qmf_matrix(const TrialList& trials, const QmfContext& ctx) {
  QmfMatrix m;
  m.names = qmf_names(ctx);
  m.rows.reserve(trials.size());
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& t = trials.entries[i];
    try {
      m.rows.push_back({t.enroll_id, t.test_id, extract_qmf(t, ctx).values});
    } catch (const DataError& err) {
      throw DataError("trial " + std::to_string(i + 1) + " (" + t.enroll_id + " " + t.test_id +
                      "): " + err.what());
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Fusion model

/// One input column of the fusion. Weights are in the column's original
/// units; shift/scale record the standardization used while fitting.
/// A dropped column was constant at fit time, up to a population std of
/// kConstantColumnTol * (1 + |mean|); its mean is kept in `shift` and its
/// weight is 0.
inline constexpr double kConstantColumnTol = 1e-12;

struct FusionColumn {
  std::string name;
  double weight = 0.0;
  double shift = 0.0;
  double scale = 1.0;
  bool dropped = false;

  bool operator==(const FusionColumn&) const = default;
};

struct FusionModel {
  std::vector<FusionColumn> systems;  // named "x.<k>", k from 1
  std::vector<FusionColumn> qmfs;     // named by feature
  double bias = 0.0;

  bool operator==(const FusionModel&) const = default;
};

inline std::string system_column_name(std::size_t k) { return "x." + std::to_string(k + 1); }

/// Key layout: bias; per system x.<k> then shift.x.<k>/scale.x.<k> or
/// dropped.x.<k>; per feature y.<name>, shift.y.<name>, scale.y.<name>, or
/// dropped.<name>. Dropped entries carry the constant column value.
inline ModelFile to_model(const FusionModel& m) {
  ModelFile f;
  f.set("bias", m.bias);
  for (const auto& c : m.systems) {
    f.set(c.name, c.weight);
    if (c.dropped) {
      f.set("dropped." + c.name, c.shift);
    } else {
      f.set("shift." + c.name, c.shift);
      f.set("scale." + c.name, c.scale);
    }
  }
  for (const auto& c : m.qmfs) {
    if (c.dropped) {
      f.set("dropped." + c.name, c.shift);
    } else {
      f.set("y." + c.name, c.weight);
      f.set("shift.y." + c.name, c.shift);
      f.set("scale.y." + c.name, c.scale);
    }
  }
  return f;
}

inline FusionModel fusion_from_model(const ModelFile& f) {
  FusionModel m;
  m.bias = f.at("bias");
  std::unordered_map<std::string, std::size_t> seen;
  for (const auto& [key, value] : f.entries) {
    auto starts = [&](std::string_view p) { return key.rfind(p, 0) == 0; };
    if (key == "bias" || starts("shift.") || starts("scale.") || starts("dropped.x.")) continue;
    if (starts("x.")) {
      if (key != system_column_name(m.systems.size()))
        throw DataError("fusion model: expected key '" + system_column_name(m.systems.size()) +
                        "', got '" + key + "'");
      FusionColumn c{key, value};
      if (auto d = f.find("dropped." + key)) {
        c.dropped = true;
        c.shift = *d;
        c.scale = 0.0;
      } else {
        c.shift = f.at("shift." + key);
        c.scale = f.at("scale." + key);
      }
      m.systems.push_back(std::move(c));
    } else if (starts("y.")) {
      const std::string name = key.substr(2);
      m.qmfs.push_back({name, value, f.at("shift." + key), f.at("scale." + key), false});
    } else if (starts("dropped.")) {
      const std::string name = key.substr(8);
      m.qmfs.push_back({name, 0.0, value, 0.0, true});
    } else {
      throw DataError("fusion model: unexpected key '" + key + "'");
    }
  }
  for (const auto& c : m.qmfs)
    if (!seen.emplace(c.name, 0).second) throw DataError("fusion model: duplicate feature '" + c.name + "'");
  if (m.systems.empty()) throw DataError("fusion model has no system weights");
  for (const auto& c : m.systems)
    if (!c.dropped && !(c.scale > 0.0)) throw DataError("fusion model: nonpositive scale for " + c.name);
  for (const auto& c : m.qmfs)
    if (!c.dropped && !(c.scale > 0.0)) throw DataError("fusion model: nonpositive scale for " + c.name);
  return m;
}

struct FusionFitOptions {
  double learning_rate = 0.1;
  std::size_t iterations = 5000;
  double l2 = 0.0;
  bool standardize = true;
};

namespace detail {

inline void check_aligned(std::span<const ScoreFile> systems, const QmfMatrix* qmf) {
  if (systems.empty()) throw DataError("at least one score set is required");
  const auto& ref = systems.front();
  auto same = [](const std::string& a1, const std::string& b1, const std::string& a2,
                 const std::string& b2) { return a1 == a2 && b1 == b2; };
  for (std::size_t k = 1; k < systems.size(); ++k) {
    if (systems[k].size() != ref.size())
      throw DataError("score set " + std::to_string(k + 1) + " has a different number of trials");
    for (std::size_t i = 0; i < ref.size(); ++i)
      if (!same(systems[k].entries[i].enroll_id, systems[k].entries[i].test_id,
                ref.entries[i].enroll_id, ref.entries[i].test_id))
        throw DataError("score set " + std::to_string(k + 1) + " line " + std::to_string(i + 1) +
                        " is not aligned with score set 1");
  }
  if (qmf) {
    if (qmf->rows.size() != ref.size())
      throw DataError("qmf matrix has a different number of trials than the score sets");
    for (std::size_t i = 0; i < ref.size(); ++i)
      if (!same(qmf->rows[i].enroll_id, qmf->rows[i].test_id, ref.entries[i].enroll_id,
                ref.entries[i].test_id))
        throw DataError("qmf row " + std::to_string(i + 1) + " is not aligned with the score sets");
  }
}

}  // namespace detail

/// Logistic-regression fit of the fusion weights by full-batch gradient
/// descent on standardized columns. Constant columns are dropped.
inline FusionModel fit_fusion(std::span<const ScoreFile> systems, const QmfMatrix* qmf,
                              std::span<const Label> labels, const FusionFitOptions& opts = {}) {
  detail::check_aligned(systems, qmf);
  const std::size_t n = systems.front().size();
  if (labels.size() != n) throw DataError("label count does not match the number of trials");
  const auto n_tar = std::count(labels.begin(), labels.end(), Label::target);
  if (n_tar == 0 || n_tar == static_cast<std::ptrdiff_t>(n))
    throw NumericError("fusion needs both target and nontarget trials");
  if (!(opts.learning_rate > 0.0) || opts.iterations == 0 || opts.l2 < 0.0)
    throw DataError("invalid fusion fit options");

  FusionModel model;
  std::vector<Vector> columns;
  std::vector<FusionColumn*> owners;
  for (std::size_t k = 0; k < systems.size(); ++k) {
    model.systems.push_back({system_column_name(k)});
    columns.push_back(systems[k].scores());
  }
  if (qmf) {
    for (std::size_t j = 0; j < qmf->names.size(); ++j) {
      model.qmfs.push_back({qmf->names[j]});
      Vector col(n);
      for (std::size_t i = 0; i < n; ++i) col[i] = qmf->rows[i].values[j];
      columns.push_back(std::move(col));
    }
  }
  for (auto& c : model.systems) owners.push_back(&c);
  for (auto& c : model.qmfs) owners.push_back(&c);

  // Standardized design matrix over the kept columns, column-major.
  std::vector<Vector> x;
  std::vector<FusionColumn*> kept;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    auto& col = columns[j];
    auto* owner = owners[j];
    for (double v : col)
      if (!std::isfinite(v)) throw NumericError("non-finite value in column " + owner->name);
    const double m = mean(col);
    const double sd = col.size() < 2 ? 0.0 : population_std(col);
    if (sd <= kConstantColumnTol * (1.0 + std::abs(m))) {
      owner->dropped = true;
      owner->shift = m;
      owner->scale = 0.0;
      continue;
    }
    if (opts.standardize) {
      owner->shift = m;
      owner->scale = sd;
    }
    for (double& v : col) v = (v - owner->shift) / owner->scale;
    x.push_back(std::move(col));
    kept.push_back(owner);
  }

  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = labels[i] == Label::target ? 1.0 : 0.0;

  Vector w(x.size(), 0.0);
  double b = 0.0;
  Vector residual(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t it = 0; it < opts.iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double z = b;
      for (std::size_t j = 0; j < x.size(); ++j) z += w[j] * x[j][i];
      residual[i] = sigmoid(z) - y[i];
    }
    double gb = 0.0;
    for (double r : residual) gb += r;
    b -= opts.learning_rate * gb * inv_n;
    for (std::size_t j = 0; j < x.size(); ++j) {
      double g = 0.0;
      for (std::size_t i = 0; i < n; ++i) g += residual[i] * x[j][i];
      w[j] -= opts.learning_rate * (g * inv_n + opts.l2 * w[j]);
    }
  }

  // Back to original units: w_j (v - shift_j) / scale_j.
  model.bias = b;
  for (std::size_t j = 0; j < kept.size(); ++j) {
    kept[j]->weight = w[j] / kept[j]->scale;
    model.bias -= kept[j]->weight * kept[j]->shift;
  }
  if (!std::isfinite(model.bias)) throw NumericError("fusion fit diverged");
  return model;
}

/// Linear fusion of aligned score sets and quality measures.
inline ScoreFile fuse(std::span<const ScoreFile> systems, const QmfMatrix* qmf,
                      const FusionModel& model) {
  detail::check_aligned(systems, qmf);
  if (systems.size() != model.systems.size())
    throw DataError("model expects " + std::to_string(model.systems.size()) + " score sets, got " +
                    std::to_string(systems.size()));

  // Map each kept feature to its qmf column; the name sets must agree.
  std::vector<std::pair<std::size_t, double>> features;
  const std::size_t n_qmf = qmf ? qmf->names.size() : 0;
  if (n_qmf != model.qmfs.size())
    throw DataError("model has " + std::to_string(model.qmfs.size()) + " quality features, input has " +
                    std::to_string(n_qmf));
  for (const auto& c : model.qmfs) {
    auto it = std::find(qmf->names.begin(), qmf->names.end(), c.name);
    if (it == qmf->names.end()) throw DataError("quality feature '" + c.name + "' missing from input");
    if (!c.dropped)
      features.emplace_back(static_cast<std::size_t>(it - qmf->names.begin()), c.weight);
  }

  ScoreFile out;
  const auto& ref = systems.front();
  out.entries.reserve(ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < systems.size(); ++k)
      s += model.systems[k].weight * systems[k].entries[i].score;
    for (const auto& [j, wt] : features) s += wt * qmf->rows[i].values[j];
    s += model.bias;
    out.entries.push_back({ref.entries[i].enroll_id, ref.entries[i].test_id, s});
  }
  return out;
}

}  // namespace asvback

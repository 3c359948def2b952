// asvback/normalization.hpp

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

// Adaptive score normalization (AS-Norm) with a speaker-wise top-K cohort,
// and its trainable variant (TAS-Norm), which passes the cohort mean and
// std through learned affine+sigmoid maps before normalizing:
//
//   S_as  = 1/2 [ (S - m_e) / s_e + (S - m_t) / s_t ]
//   S_tas = 1/2 [ (S - sig(wm*m_e + bm)) / sig(ws*s_e + bs)
//               + (S - sig(wm*m_t + bm)) / sig(ws*s_t + bs) ]
//
// TAS-Norm is trained with mini-batch gradient descent on the binary
// cross-entropy of sig(S_tas - t), where t is the EER threshold of the
// batch's current S_tas values and is held constant when differentiating.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "asvback/core.hpp"
#include "asvback/error.hpp"
#include "asvback/io.hpp"
#include "asvback/metrics.hpp"
#include "asvback/random.hpp"
#include "asvback/scoring.hpp"

namespace asvback {

inline constexpr std::size_t kDefaultTopK = 400;

// ---------------------------------------------------------------------------
// Cohort statistics

/// Mean and population std of the `top_k` largest of `scores`. The
/// selected scores are sorted before summation, so the result does not
/// depend on the order of `scores`.
inline CohortStats top_k_stats(std::string id, std::vector<double> scores, std::size_t top_k) {
  if (top_k < 2) throw DataError("top_k must be at least 2");
  if (scores.size() < top_k)
    throw NumericError("cohort of " + std::to_string(scores.size()) + " is smaller than top_k " +
                       std::to_string(top_k));
  std::partial_sort(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(top_k),
                    scores.end(), std::greater<>());
  scores.resize(top_k);
  CohortStats s{std::move(id), mean(scores), population_std(scores)};
  if (!(s.std > 0.0)) throw NumericError("degenerate cohort for '" + s.id + "': std is 0");
  return s;
}

inline CohortStats cohort_stats(std::string id, ConstVectorView embedding,
                                const EmbeddingStore& cohort, std::size_t top_k) {
  std::vector<double> scores;
  scores.reserve(cohort.size());
  for (const auto& c : cohort) scores.push_back(cosine(embedding, c.values));
  return top_k_stats(std::move(id), std::move(scores), top_k);
}

/// Stats for every embedding of `store`, in store order.
inline CohortStatsTable cohort_stats_table(const EmbeddingStore& store,
                                           const EmbeddingStore& cohort, std::size_t top_k) {
  CohortStatsTable out;
  for (const auto& e : store) out.add(cohort_stats(e.id, e.values, cohort, top_k));
  return out;
}

/// Stats for every speaker prototype.
inline CohortStatsTable cohort_stats_table(const PrototypeMap& prototypes,
                                           const EmbeddingStore& cohort, std::size_t top_k) {
  CohortStatsTable out;
  for (const auto& [id, p] : prototypes) out.add(cohort_stats(id, p.vector, cohort, top_k));
  return out;
}

/// Averages cohort utterances speaker-wise: one embedding per speaker of
/// `speakers`, in map order.
inline EmbeddingStore speaker_average(const EmbeddingStore& utterances, const EnrollMap& speakers) {
  EmbeddingStore out;
  const auto protos = build_prototypes(utterances, speakers);
  for (const auto& entry : speakers.entries)
    out.add({entry.speaker_id, protos.at(entry.speaker_id).vector});
  return out;
}

// ---------------------------------------------------------------------------
// AS-Norm

inline double as_norm(double score, const CohortStats& enroll, const CohortStats& test) {
  if (!(enroll.std > 0.0) || !(test.std > 0.0))
    throw NumericError("AS-Norm needs positive cohort std");
  return 0.5 * ((score - enroll.mean) / enroll.std + (score - test.mean) / test.std);
}

// ---------------------------------------------------------------------------
// TAS-Norm

struct TasNormParams {
  double w_mean = 0.0;
  double b_mean = 0.0;
  double w_std = 0.0;
  double b_std = 0.0;

  bool finite() const {
    return std::isfinite(w_mean) && std::isfinite(b_mean) && std::isfinite(w_std) &&
           std::isfinite(b_std);
  }
  bool operator==(const TasNormParams&) const = default;

  /// Recalibrated cohort mean and std.
  double calibrated_mean(double m) const { return sigmoid(w_mean * m + b_mean); }
  double calibrated_std(double s) const { return sigmoid(w_std * s + b_std); }
};

inline ModelFile to_model(const TasNormParams& p) {
  ModelFile m;
  m.set("w_mean", p.w_mean);
  m.set("b_mean", p.b_mean);
  m.set("w_std", p.w_std);
  m.set("b_std", p.b_std);
  return m;
}

inline TasNormParams tas_params_from_model(const ModelFile& m) {
  for (const auto& [k, v] : m.entries) {
    (void)v;
    if (k != "w_mean" && k != "b_mean" && k != "w_std" && k != "b_std")
      throw DataError("unexpected key '" + k + "' in TAS-Norm parameter file");
  }
  return {m.at("w_mean"), m.at("b_mean"), m.at("w_std"), m.at("b_std")};
}

inline double tas_norm(double score, const CohortStats& enroll, const CohortStats& test,
                       const TasNormParams& params) {
  if (!params.finite()) throw NumericError("non-finite TAS-Norm parameter");
  const double me = params.calibrated_mean(enroll.mean);
  const double se = params.calibrated_std(enroll.std);
  const double mt = params.calibrated_mean(test.mean);
  const double st = params.calibrated_std(test.std);
  return 0.5 * ((score - me) / se + (score - mt) / st);
}

/// One labeled trial with its raw score and both sides' cohort stats.
struct TasTrial {
  double score = 0.0;
  CohortStats enroll;
  CohortStats test;
  Label label = Label::nontarget;
};

/// Joins scores, labels and cohort stats into training trials.
inline std::vector<TasTrial> make_tas_trials(const ScoreFile& scores, const TrialList& trials,
                                             const CohortStatsTable& enroll_stats,
                                             const CohortStatsTable& test_stats) {
  const auto labels = aligned_labels(scores, trials);
  std::vector<TasTrial> out;
  out.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto& s = scores.entries[i];
    out.push_back({s.score, enroll_stats.at(s.enroll_id), test_stats.at(s.test_id), labels[i]});
  }
  return out;
}

/// Gradient of the training loss with respect to the four parameters.
struct TasGradient {
  double w_mean = 0.0;
  double b_mean = 0.0;
  double w_std = 0.0;
  double b_std = 0.0;
};

inline constexpr double kProbFloor = 1e-12;

/// EER threshold over the batch's current TAS-Norm scores.
inline double tas_batch_threshold(std::span<const TasTrial> batch, const TasNormParams& params) {
  std::vector<double> s;
  std::vector<Label> l;
  s.reserve(batch.size());
  l.reserve(batch.size());
  for (const auto& t : batch) {
    s.push_back(tas_norm(t.score, t.enroll, t.test, params));
    l.push_back(t.label);
  }
  return eer(s, l).threshold;
}

/// Mean binary cross-entropy of sig(S_tas - threshold) against the labels,
/// with probabilities clamped to [1e-12, 1 - 1e-12]. When `grad` is given
/// it receives the exact gradient of this loss with `threshold` fixed.
inline double tas_loss(std::span<const TasTrial> batch, const TasNormParams& params,
                       double threshold, TasGradient* grad = nullptr) {
  if (batch.empty()) throw DataError("empty batch");
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  TasGradient g;
  for (const auto& t : batch) {
    const double me = params.calibrated_mean(t.enroll.mean);
    const double se = params.calibrated_std(t.enroll.std);
    const double mt = params.calibrated_mean(t.test.mean);
    const double st = params.calibrated_std(t.test.std);
    const double s_tas = 0.5 * ((t.score - me) / se + (t.score - mt) / st);

    const double p_raw = sigmoid(s_tas - threshold);
    const double p = std::clamp(p_raw, kProbFloor, 1.0 - kProbFloor);
    const double y = t.label == Label::target ? 1.0 : 0.0;
    loss -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);

    if (!grad || p != p_raw) continue;
    const double dz = (p - y) * inv_n;
    // d S_tas / d(mean arg) = -1/2 * sig'(.) / s ; d S_tas / d(std arg) = -1/2 * (S - m) * (1 - s) / s
    const double dme = -0.5 * me * (1.0 - me) / se;
    const double dmt = -0.5 * mt * (1.0 - mt) / st;
    const double dse = -0.5 * (t.score - me) * (1.0 - se) / se;
    const double dst = -0.5 * (t.score - mt) * (1.0 - st) / st;
    g.w_mean += dz * (dme * t.enroll.mean + dmt * t.test.mean);
    g.b_mean += dz * (dme + dmt);
    g.w_std += dz * (dse * t.enroll.std + dst * t.test.std);
    g.b_std += dz * (dse + dst);
  }
  if (grad) *grad = g;
  return loss * inv_n;
}

/// NLL over the whole set, with the threshold taken from the whole set.
inline double tas_nll(std::span<const TasTrial> trials, const TasNormParams& params) {
  return tas_loss(trials, params, tas_batch_threshold(trials, params));
}

struct TasNormTrainConfig {
  std::size_t batch_size = 256;
  std::size_t steps = 2000;
  double learning_rate = 1e-2;
  std::uint64_t seed = 0;
  // Test-utterance crop range in seconds; carried for fixture generation.
  double test_crop_min_s = 1.0;
  double test_crop_max_s = 1.8;
  /// Whole-set NLL is checked every `eval_every` steps and after the last
  /// one; the best iterate is returned. 0 returns the last iterate.
  std::size_t eval_every = 50;
};

struct TasNormTrainResult {
  TasNormParams params;
  double initial_nll = 0.0;
  double final_nll = 0.0;  // NLL of `params`
  std::size_t best_step = 0;  // number of steps taken to reach `params`
};

inline TasNormTrainResult tas_norm_train(std::span<const TasTrial> trials,
                                         const TasNormTrainConfig& config,
                                         TasNormParams init = {}) {
  if (trials.empty()) throw DataError("no training trials");
  if (config.batch_size == 0 || config.steps == 0 || !(config.learning_rate > 0.0))
    throw DataError("batch size, steps and learning rate must be positive");
  if (!init.finite()) throw NumericError("non-finite initial TAS-Norm parameters");

  std::vector<std::size_t> targets, nontargets;
  for (std::size_t i = 0; i < trials.size(); ++i)
    (trials[i].label == Label::target ? targets : nontargets).push_back(i);
  if (targets.empty() || nontargets.empty())
    throw NumericError("TAS-Norm training needs both target and nontarget trials");

  TasNormTrainResult result;
  result.params = init;
  result.initial_nll = tas_nll(trials, init);
  TasNormParams current = init;
  double best = result.initial_nll;

  Rng rng(config.seed);
  const std::size_t batch_size = std::min(config.batch_size, trials.size());
  std::vector<std::size_t> order(trials.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::size_t cursor = order.size();
  std::vector<TasTrial> batch;
  batch.reserve(batch_size);

  for (std::size_t step = 0; step < config.steps; ++step) {
    if (cursor + batch_size > order.size()) {
      rng.shuffle(order);
      cursor = 0;
    }
    batch.clear();
    bool has_tar = false, has_non = false;
    for (std::size_t i = 0; i < batch_size; ++i) {
      const auto& t = trials[order[cursor + i]];
      (t.label == Label::target ? has_tar : has_non) = true;
      batch.push_back(t);
    }
    cursor += batch_size;
    // A single-class batch has no threshold; swap in one trial of the
    // missing class.
    if (!has_tar || !has_non) {
      const auto& pool = has_tar ? nontargets : targets;
      const auto k = rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1);
      batch.back() = trials[pool[static_cast<std::size_t>(k)]];
    }

    TasGradient g;
    try {
      tas_loss(batch, current, tas_batch_threshold(batch, current), &g);
    } catch (const NumericError&) {
      if (config.eval_every == 0)
        throw NumericError("TAS-Norm training diverged at step " + std::to_string(step));
      break;
    }
    auto& p = current;
    p.w_mean -= config.learning_rate * g.w_mean;
    p.b_mean -= config.learning_rate * g.b_mean;
    p.w_std -= config.learning_rate * g.w_std;
    p.b_std -= config.learning_rate * g.b_std;
    if (!p.finite()) {
      if (config.eval_every == 0)
        throw NumericError("TAS-Norm training diverged at step " + std::to_string(step));
      break;
    }
    const bool last = step + 1 == config.steps;
    if (config.eval_every != 0 && ((step + 1) % config.eval_every == 0 || last)) {
      const auto scores = [&] {
        std::vector<double> v;
        for (const auto& t : trials) v.push_back(tas_norm(t.score, t.enroll, t.test, p));
        return v;
      }();
      if (!all_finite(scores)) break;
      const double nll = tas_nll(trials, p);
      if (nll < best) {
        best = nll;
        result.params = p;
        result.best_step = step + 1;
      }
    }
  }
  if (config.eval_every == 0) {
    result.params = current;
    result.best_step = config.steps;
  }
  result.final_nll = tas_nll(trials, result.params);
  return result;
}

}  // namespace asvback

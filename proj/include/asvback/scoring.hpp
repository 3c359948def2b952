// asvback/scoring.hpp

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

#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "asvback/core.hpp"
#include "asvback/error.hpp"
#include "asvback/io.hpp"

namespace asvback {

/// Duration assigned to an enrollment utterance in which the VAD found no
/// speech (duration exactly 0).
inline constexpr double kNoSpeechDuration = 1e-6;

struct SpeakerPrototype {
  std::string speaker_id;
  Vector vector;
  /// Utterance id and its weight, in enrollment order. Weights sum to 1.
  std::vector<std::pair<std::string, double>> weights;
};

using PrototypeMap = std::map<std::string, SpeakerPrototype>;

namespace detail {

inline SpeakerPrototype weighted_prototype(std::string speaker_id,
                                           std::span<const Embedding* const> embeddings,
                                           const std::vector<double>& weights) {
  SpeakerPrototype p{std::move(speaker_id), Vector(embeddings.front()->dim(), 0.0), {}};
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    const auto& v = embeddings[i]->values;
    for (std::size_t d = 0; d < v.size(); ++d) p.vector[d] += weights[i] * v[d];
    p.weights.emplace_back(embeddings[i]->id, weights[i]);
  }
  return p;
}

inline void check_embeddings(const std::string& speaker_id,
                             std::span<const Embedding* const> embeddings) {
  if (embeddings.empty())
    throw DataError("speaker '" + speaker_id + "' has no enrollment embeddings");
  const auto dim = embeddings.front()->dim();
  for (const auto* e : embeddings)
    if (e->dim() != dim)
      throw DataError("speaker '" + speaker_id + "': enrollment embedding '" + e->id +
                      "' has dimension " + std::to_string(e->dim()) + ", expected " +
                      std::to_string(dim));
}

}  // namespace detail

/// Plain average of the enrollment embeddings.
inline SpeakerPrototype build_prototype(std::string speaker_id,
                                        std::span<const Embedding* const> embeddings) {
  detail::check_embeddings(speaker_id, embeddings);
  const double w = 1.0 / static_cast<double>(embeddings.size());
  return detail::weighted_prototype(std::move(speaker_id), embeddings,
                                    std::vector<double>(embeddings.size(), w));
}

/// Duration-weighted sum: weight_i = d_i / sum(d). Utterances with zero
/// duration count as kNoSpeechDuration seconds. The result is not
/// length-normalized.
inline SpeakerPrototype build_prototype(std::string speaker_id,
                                        std::span<const Embedding* const> embeddings,
                                        const QualityTable& durations) {
  detail::check_embeddings(speaker_id, embeddings);
  std::vector<double> d;
  d.reserve(embeddings.size());
  for (const auto* e : embeddings) {
    auto v = durations.find(e->id);
    if (!v) throw DataError("no duration for enrollment utterance '" + e->id + "'");
    if (*v < 0.0) throw DataError("negative duration for utterance '" + e->id + "'");
    d.push_back(*v == 0.0 ? kNoSpeechDuration : *v);
  }
  double total = 0.0;
  for (double x : d) total += x;
  for (double& x : d) x /= total;
  return detail::weighted_prototype(std::move(speaker_id), embeddings, d);
}

/// Builds one prototype per speaker of `map`, looking utterances up in
/// `store`. Pass `durations` to get duration-weighted prototypes.
inline PrototypeMap build_prototypes(const EmbeddingStore& store, const EnrollMap& map,
                                     const QualityTable* durations = nullptr) {
  PrototypeMap out;
  for (const auto& entry : map.entries) {
    std::vector<const Embedding*> embs;
    for (const auto& u : entry.utterance_ids) {
      const auto* e = store.find(u);
      if (!e)
        throw DataError("speaker '" + entry.speaker_id + "': unknown enrollment utterance '" +
                        u + "'");
      embs.push_back(e);
    }
    auto p = durations ? build_prototype(entry.speaker_id, embs, *durations)
                       : build_prototype(entry.speaker_id, embs);
    out.emplace(entry.speaker_id, std::move(p));
  }
  return out;
}

/// Cosine score of every trial, in trial order.
inline ScoreFile score_trials(const EmbeddingStore& store, const PrototypeMap& prototypes,
                              const TrialList& trials) {
  ScoreFile out;
  out.entries.reserve(trials.size());
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& t = trials.entries[i];
    const auto where = "trial " + std::to_string(i + 1) + " (" + t.enroll_id + " " + t.test_id + ")";
    auto p = prototypes.find(t.enroll_id);
    if (p == prototypes.end()) throw DataError(where + ": unknown enrollment speaker '" + t.enroll_id + "'");
    const auto* e = store.find(t.test_id);
    if (!e) throw DataError(where + ": unknown test utterance '" + t.test_id + "'");
    double s;
    try {
      s = cosine(p->second.vector, e->values);
    } catch (const DataError& err) {
      throw DataError(where + ": " + err.what());
    } catch (const NumericError& err) {
      throw NumericError(where + ": " + err.what());
    }
    out.entries.push_back({t.enroll_id, t.test_id, s});
  }
  return out;
}

}  // namespace asvback

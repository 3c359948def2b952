// tests/scoring_test.cpp

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

#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "asvback/scoring.hpp"
#include "test_util.hpp"

using namespace asvback;

namespace {

std::vector<const Embedding*> ptrs(const std::vector<Embedding>& v) {
  std::vector<const Embedding*> out;
  for (const auto& e : v) out.push_back(&e);
  return out;
}

QualityTable durations(const std::vector<std::pair<std::string, double>>& d) {
  QualityTable t("duration");
  for (const auto& [k, v] : d) t.add(k, v);
  return t;
}

double weight_sum(const SpeakerPrototype& p) {
  double s = 0;
  for (const auto& [id, w] : p.weights) s += w;
  return s;
}

}  // namespace

TEST(Prototype, DurationWeights) {
  std::vector<Embedding> e{{"e1", {1, 0}}, {"e2", {0, 1}}};
  const auto p = build_prototype("s", ptrs(e), durations({{"e1", 3}, {"e2", 1}}));
  EXPECT_EQ(p.vector, (Vector{0.75, 0.25}));
  ASSERT_EQ(p.weights.size(), 2u);
  EXPECT_EQ(p.weights[0], (std::pair<std::string, double>{"e1", 0.75}));
  EXPECT_EQ(p.weights[1], (std::pair<std::string, double>{"e2", 0.25}));
}

TEST(Prototype, SingleEmbeddingIsItself) {
  std::vector<Embedding> e{{"e1", {0.3, -0.7, 2.0}}};
  EXPECT_EQ(build_prototype("s", ptrs(e), durations({{"e1", 0.4}})).vector, e[0].values);
  EXPECT_EQ(build_prototype("s", ptrs(e)).vector, e[0].values);
  EXPECT_EQ(build_prototype("s", ptrs(e)).weights[0].second, 1.0);
}

TEST(Prototype, ZeroDurationFallsBackToOneMicrosecond) {
  std::vector<Embedding> e{{"e1", {1, 0}}, {"e2", {0, 1}}};
  const auto p = build_prototype("s", ptrs(e), durations({{"e1", 0}, {"e2", 0}}));
  EXPECT_EQ(p.vector, (Vector{0.5, 0.5}));

  // Against a 1 s utterance the silent one weighs exactly 1e-6 / (1 + 1e-6).
  const auto q = build_prototype("s", ptrs(e), durations({{"e1", 1.0}, {"e2", 0}}));
  EXPECT_EQ(q.weights[1].second, 1e-6 / (1.0 + 1e-6));
  EXPECT_EQ(kNoSpeechDuration, 1e-6);

  // Small positive durations are used as they are.
  const auto r = build_prototype("s", ptrs(e), durations({{"e1", 1e-9}, {"e2", 1e-9}}));
  EXPECT_EQ(r.weights[0].second, 0.5);
  const auto t = build_prototype("s", ptrs(e), durations({{"e1", 1e-9}, {"e2", 0}}));
  EXPECT_NEAR(t.weights[1].second, 1e-6 / (1e-6 + 1e-9), 1e-15);
}

TEST(Prototype, Errors) {
  std::vector<Embedding> none;
  EXPECT_THROW(build_prototype("s", ptrs(none)), DataError);
  std::vector<Embedding> e{{"e1", {1, 0}}, {"e2", {0, 1}}};
  EXPECT_THROW(build_prototype("s", ptrs(e), durations({{"e1", -1}, {"e2", 1}})), DataError);
  EXPECT_THROW(build_prototype("s", ptrs(e), durations({{"e1", 1}})), DataError);
  std::vector<Embedding> mixed{{"e1", {1, 0}}, {"e2", {0, 1, 0}}};
  EXPECT_THROW(build_prototype("s", ptrs(mixed)), DataError);
}

TEST(Prototype, WeightsSumToOneAndScaleFree) {
  Rng rng(3);
  for (int t = 0; t < 500; ++t) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(1, 12));
    std::vector<Embedding> e;
    QualityTable d("duration"), d2("duration"), dk("duration");
    const double k = rng.uniform(0.1, 10.0);
    const double pow2 = std::ldexp(1.0, static_cast<int>(rng.uniform_int(-8, 8)));
    for (std::size_t i = 0; i < n; ++i) {
      const auto id = "u" + std::to_string(i);
      e.push_back({id, testutil::random_vector(rng, 8)});
      const double dur = rng.bernoulli(0.1) ? 0.0 : rng.uniform(0.2, 20.0);
      d.add(id, dur);
      d2.add(id, dur * pow2);
      dk.add(id, dur * k);
    }
    const auto p = build_prototype("s", ptrs(e), d);
    ASSERT_NEAR(weight_sum(p), 1.0, 1e-12);
    for (const auto& [id, w] : p.weights) ASSERT_GE(w, 0.0);
    // Bit-identical under power-of-two rescaling, equal to rounding otherwise.
    bool any_zero = false;
    for (const auto& [id, v] : d.entries()) any_zero |= v == 0.0;
    if (!any_zero) {
      ASSERT_EQ(build_prototype("s", ptrs(e), d2).weights, p.weights);
      const auto pk = build_prototype("s", ptrs(e), dk);
      for (std::size_t i = 0; i < n; ++i) ASSERT_NEAR(pk.weights[i].second, p.weights[i].second, 1e-15);
    }
  }
}

TEST(Prototype, UniformDurationsGiveTheMean) {
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(1, 10));
    std::vector<Embedding> e;
    QualityTable d("duration");
    const double dur = rng.uniform(0.5, 3.0);
    for (std::size_t i = 0; i < n; ++i) {
      e.push_back({"u" + std::to_string(i), testutil::random_vector(rng, 16)});
      d.add(e.back().id, dur);
    }
    const auto p = build_prototype("s", ptrs(e), d);
    for (std::size_t j = 0; j < 16; ++j) {
      double m = 0;
      for (const auto& x : e) m += x.values[j];
      m /= static_cast<double>(n);
      ASSERT_NEAR(p.vector[j], m, 1e-12);
    }
  }
}

TEST(ScoreTrials, AnalyticScores) {
  EmbeddingStore store(2);
  store.add({"enr", {1, 0}});
  store.add({"same", {1, 0}});
  store.add({"opp", {-1, 0}});
  EnrollMap map{{{"spk", {"enr"}}}};
  const auto protos = build_prototypes(store, map);
  TrialList trials{{{"spk", "same", Label::target}, {"spk", "opp", Label::nontarget}}};
  const auto s = score_trials(store, protos, trials);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.entries[0].score, 1.0);
  EXPECT_EQ(s.entries[1].score, -1.0);
  EXPECT_EQ(s.entries[1].test_id, "opp");
}

TEST(ScoreTrials, UnknownIdsNameTheTrial) {
  EmbeddingStore store(2);
  store.add({"enr", {1, 0}});
  const auto protos = build_prototypes(store, EnrollMap{{{"spk", {"enr"}}}});
  TrialList trials{{{"spk", "enr", std::nullopt}, {"spk", "ghost", std::nullopt}}};
  try {
    score_trials(store, protos, trials);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_EQ(std::string(e.what()), "trial 2 (spk ghost): unknown test utterance 'ghost'");
  }
  TrialList bad_spk{{{"nobody", "enr", std::nullopt}}};
  EXPECT_THROW(score_trials(store, protos, bad_spk), DataError);
  EXPECT_THROW(build_prototypes(store, EnrollMap{{{"spk", {"missing"}}}}), DataError);
}

TEST(ScoreTrials, MatchesNaiveReferenceLoop) {
  Rng rng(100);
  const std::size_t dim = 24;
  EmbeddingStore store(dim);
  EnrollMap map;
  for (int s = 0; s < 10; ++s) {
    EnrollEntry e{"spk" + std::to_string(s), {}};
    for (int u = 0; u < 3; ++u) {
      const auto id = e.speaker_id + "-e" + std::to_string(u);
      store.add({id, testutil::random_vector(rng, dim)});
      e.utterance_ids.push_back(id);
    }
    map.entries.push_back(e);
  }
  for (int t = 0; t < 40; ++t) store.add({"test" + std::to_string(t), testutil::random_vector(rng, dim)});
  TrialList trials;
  for (int i = 0; i < 100; ++i)
    trials.entries.push_back({"spk" + std::to_string(rng.uniform_int(0, 9)),
                              "test" + std::to_string(rng.uniform_int(0, 39)), std::nullopt});

  const auto scores = score_trials(store, build_prototypes(store, map), trials);
  ASSERT_EQ(scores.size(), trials.size());
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& t = trials.entries[i];
    ASSERT_EQ(scores.entries[i].enroll_id, t.enroll_id);
    ASSERT_EQ(scores.entries[i].test_id, t.test_id);
    // Reference: sum (not average) of enrollment vectors; cosine is scale-free.
    const int spk = std::stoi(t.enroll_id.substr(3));
    long double proto[24] = {};
    for (int u = 0; u < 3; ++u) {
      const auto& v = store.at("spk" + std::to_string(spk) + "-e" + std::to_string(u)).values;
      for (std::size_t d = 0; d < dim; ++d) proto[d] += v[d];
    }
    const auto& x = store.at(t.test_id).values;
    long double ab = 0, aa = 0, bb = 0;
    for (std::size_t d = 0; d < dim; ++d) {
      ab += proto[d] * x[d];
      aa += proto[d] * proto[d];
      bb += static_cast<long double>(x[d]) * x[d];
    }
    ASSERT_NEAR(scores.entries[i].score, static_cast<double>(ab / std::sqrt(aa * bb)), 1e-12);
  }
}

TEST(ScoreTrials, LengthNormalizingEnrollmentFirstIsANoOpOnUnitEmbeddings) {
  // Whether enrollment embeddings should be length-normalized before the
  // weighted sum is left open; for unit-norm inputs the two agree.
  Rng rng(9);
  EmbeddingStore raw(8), unit(8);
  QualityTable d("duration");
  for (int i = 0; i < 4; ++i) {
    auto v = testutil::random_vector(rng, 8);
    const double n = l2_norm(v);
    for (auto& x : v) x /= n;
    raw.add({"u" + std::to_string(i), v});
    unit.add({"u" + std::to_string(i), v});
    d.add("u" + std::to_string(i), rng.uniform(1, 1.8));
  }
  EnrollMap m{{{"s", {"u0", "u1", "u2"}}}};
  TrialList t{{{"s", "u3", std::nullopt}}};
  EXPECT_EQ(score_trials(raw, build_prototypes(raw, m, &d), t), score_trials(unit, build_prototypes(unit, m, &d), t));
}

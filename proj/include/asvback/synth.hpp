// asvback/synth.hpp

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

// Synthetic speaker populations with known ground truth, for exercising the
// back-end without trained extractors. Speaker means are uniform on the
// unit sphere; each utterance is its speaker mean plus isotropic Gaussian
// noise, optionally offset by a fixed test-domain bias, then
// length-normalized.

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "asvback/core.hpp"
#include "asvback/error.hpp"
#include "asvback/io.hpp"
#include "asvback/random.hpp"

namespace asvback {

struct SynthConfig {
  std::size_t n_speakers = 50;
  std::size_t utts_per_speaker = 4;  // enrollment and test, each
  std::size_t dim = 32;
  double within_spread = 0.05;
  /// Offset added to test embeddings before normalization. Empty means
  /// zero unless test_bias_norm > 0, in which case a random direction of
  /// that length is drawn first.
  Vector test_bias;
  double test_bias_norm = 0.0;
  /// Apply the test bias to the cohort as well.
  bool bias_cohort = true;
  std::size_t n_cohort_speakers = 500;
  std::size_t cohort_utts_per_speaker = 4;
  std::size_t imposter_ratio = 10;
  double min_duration_s = 1.0;
  double max_duration_s = 1.8;
  std::uint64_t seed = 0;
};

struct SynthData {
  EmbeddingStore enroll;
  EmbeddingStore test;
  EmbeddingStore cohort;  // one speaker-averaged embedding per cohort speaker
  EnrollMap enroll_map;
  TrialList trials;
  QualityTable durations{"duration"};
};

namespace detail {

inline Vector random_unit(std::size_t dim, Rng& rng) {
  Vector v(dim);
  double n = 0.0;
  do {
    for (auto& x : v) x = rng.normal();
    n = l2_norm(v);
  } while (n == 0.0);
  for (auto& x : v) x /= n;
  return v;
}

inline Vector perturbed(const Vector& mean, double spread, const Vector& bias, Rng& rng) {
  Vector v(mean.size());
  for (std::size_t d = 0; d < v.size(); ++d) {
    v[d] = mean[d] + spread * rng.normal();
    if (!bias.empty()) v[d] += bias[d];
  }
  const double n = l2_norm(v);
  if (n == 0.0) throw NumericError("synthetic embedding collapsed to zero");
  for (auto& x : v) x /= n;
  return v;
}

inline std::string numbered(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%04zu", prefix, i);
  return buf;
}

}  // namespace detail

inline SynthData generate(const SynthConfig& cfg) {
  if (cfg.dim < 2) throw DataError("synthetic dimension must be at least 2");
  if (!(cfg.within_spread > 0.0)) throw DataError("within_spread must be positive");
  if (cfg.n_speakers < 2) throw DataError("need at least 2 speakers");
  if (cfg.utts_per_speaker == 0 || cfg.cohort_utts_per_speaker == 0 || cfg.n_cohort_speakers == 0)
    throw DataError("utterance and cohort counts must be positive");
  if (!cfg.test_bias.empty() && cfg.test_bias.size() != cfg.dim)
    throw DataError("test_bias has dimension " + std::to_string(cfg.test_bias.size()) + ", expected " +
                    std::to_string(cfg.dim));
  if (!(cfg.min_duration_s >= 0.0) || !(cfg.min_duration_s <= cfg.max_duration_s))
    throw DataError("invalid duration range");

  Rng rng(cfg.seed);
  Vector bias = cfg.test_bias;
  if (bias.empty() && cfg.test_bias_norm > 0.0) {
    bias = detail::random_unit(cfg.dim, rng);
    for (auto& x : bias) x *= cfg.test_bias_norm;
  }
  const Vector no_bias;

  std::vector<Vector> means;
  for (std::size_t s = 0; s < cfg.n_speakers; ++s) means.push_back(detail::random_unit(cfg.dim, rng));
  std::vector<Vector> cohort_means;
  for (std::size_t s = 0; s < cfg.n_cohort_speakers; ++s)
    cohort_means.push_back(detail::random_unit(cfg.dim, rng));

  SynthData out{EmbeddingStore(cfg.dim), EmbeddingStore(cfg.dim), EmbeddingStore(cfg.dim), {}, {}, QualityTable("duration")};
  std::vector<std::string> spk_ids;
  for (std::size_t s = 0; s < cfg.n_speakers; ++s) {
    spk_ids.push_back(detail::numbered("spk", s));
    EnrollEntry entry{spk_ids.back(), {}};
    for (std::size_t u = 0; u < cfg.utts_per_speaker; ++u) {
      const auto id = spk_ids.back() + "-e" + std::to_string(u);
      out.enroll.add({id, detail::perturbed(means[s], cfg.within_spread, no_bias, rng)});
      entry.utterance_ids.push_back(id);
    }
    out.enroll_map.entries.push_back(std::move(entry));
  }
  for (std::size_t s = 0; s < cfg.n_speakers; ++s)
    for (std::size_t u = 0; u < cfg.utts_per_speaker; ++u)
      out.test.add({spk_ids[s] + "-t" + std::to_string(u),
                    detail::perturbed(means[s], cfg.within_spread, bias, rng)});

  for (std::size_t s = 0; s < cfg.n_cohort_speakers; ++s) {
    Vector avg(cfg.dim, 0.0);
    for (std::size_t u = 0; u < cfg.cohort_utts_per_speaker; ++u) {
      const auto v = detail::perturbed(cohort_means[s], cfg.within_spread, cfg.bias_cohort ? bias : no_bias, rng);
      for (std::size_t d = 0; d < cfg.dim; ++d) avg[d] += v[d];
    }
    for (auto& x : avg) x /= static_cast<double>(cfg.cohort_utts_per_speaker);
    out.cohort.add({detail::numbered("coh", s), std::move(avg)});
  }

  for (const auto& e : out.enroll) out.durations.add(e.id, rng.uniform(cfg.min_duration_s, cfg.max_duration_s));
  for (const auto& e : out.test) out.durations.add(e.id, rng.uniform(cfg.min_duration_s, cfg.max_duration_s));

  const std::size_t others = cfg.n_speakers - 1;
  for (std::size_t s = 0; s < cfg.n_speakers; ++s) {
    std::vector<std::size_t> pool;
    for (std::size_t o = 0; o < cfg.n_speakers; ++o)
      if (o != s) pool.push_back(o);
    for (std::size_t u = 0; u < cfg.utts_per_speaker; ++u) {
      const auto test_id = spk_ids[s] + "-t" + std::to_string(u);
      out.trials.entries.push_back({spk_ids[s], test_id, Label::target});
      for (std::size_t k = 0; k < cfg.imposter_ratio; ++k) {
        std::size_t pick;
        if (others >= cfg.imposter_ratio) {
          const auto j = static_cast<std::size_t>(
              rng.uniform_int(static_cast<std::int64_t>(k), static_cast<std::int64_t>(others) - 1));
          std::swap(pool[k], pool[j]);
          pick = pool[k];
        } else {
          pick = pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(others) - 1))];
        }
        out.trials.entries.push_back({spk_ids[pick], test_id, Label::nontarget});
      }
    }
  }
  return out;
}

/// The committed fixture configurations.
inline SynthConfig named_config(const std::string& name) {
  SynthConfig c;
  if (name == "clean") {
    c.within_spread = 0.05;
    c.seed = 101;
  } else if (name == "noisy") {
    c.within_spread = 0.25;
    c.seed = 202;
  } else if (name == "shifted") {
    c.within_spread = 0.2;
    c.test_bias_norm = 0.6;
    c.bias_cohort = true;
    c.seed = 303;
  } else {
    throw DataError("unknown synthetic config '" + name + "' (expected clean, noisy or shifted)");
  }
  return c;
}

/// Config file: `key<TAB>value`, keys named as the SynthConfig fields;
/// test_bias is a space-separated vector, bias_cohort is 0 or 1.
inline SynthConfig read_synth_config(const std::string& path) {
  SynthConfig c;
  for (const auto& [key, value] : read_key_values(path)) {
    auto num = [&](const std::string& v) {
      auto d = detail::parse_double(v);
      if (!d) throw DataError(path + ": invalid value '" + v + "' for '" + key + "'");
      return *d;
    };
    auto count = [&](const std::string& v) {
      const double d = num(v);
      if (d < 0 || d != std::floor(d)) throw DataError(path + ": '" + key + "' must be a nonnegative integer");
      return static_cast<std::size_t>(d);
    };
    if (key == "n_speakers") c.n_speakers = count(value);
    else if (key == "utts_per_speaker") c.utts_per_speaker = count(value);
    else if (key == "dim") c.dim = count(value);
    else if (key == "within_spread") c.within_spread = num(value);
    else if (key == "test_bias_norm") c.test_bias_norm = num(value);
    else if (key == "bias_cohort") c.bias_cohort = count(value) != 0;
    else if (key == "n_cohort_speakers") c.n_cohort_speakers = count(value);
    else if (key == "cohort_utts_per_speaker") c.cohort_utts_per_speaker = count(value);
    else if (key == "imposter_ratio") c.imposter_ratio = count(value);
    else if (key == "min_duration_s") c.min_duration_s = num(value);
    else if (key == "max_duration_s") c.max_duration_s = num(value);
    else if (key == "seed") c.seed = count(value);
    else if (key == "test_bias") {
      c.test_bias.clear();
      for (auto v : detail::split(value, ' ')) c.test_bias.push_back(num(std::string(v)));
    } else {
      throw DataError(path + ": unknown synth config key '" + key + "'");
    }
  }
  return c;
}

inline constexpr const char* kSynthFiles[] = {"enroll_embeddings.tsv", "test_embeddings.tsv",
                                              "cohort_embeddings.tsv", "enroll_map.tsv",
                                              "trials.tsv",            "durations.tsv"};

inline void write_synth(const std::filesystem::path& dir, const SynthData& d) {
  std::filesystem::create_directories(dir);
  write_embeddings((dir / "enroll_embeddings.tsv").string(), d.enroll);
  write_embeddings((dir / "test_embeddings.tsv").string(), d.test);
  write_embeddings((dir / "cohort_embeddings.tsv").string(), d.cohort);
  write_enroll_map((dir / "enroll_map.tsv").string(), d.enroll_map);
  write_trials((dir / "trials.tsv").string(), d.trials);
  write_quality_table((dir / "durations.tsv").string(), d.durations);
}

inline SynthData read_synth(const std::filesystem::path& dir) {
  SynthData d;
  d.enroll = read_embeddings((dir / "enroll_embeddings.tsv").string());
  d.test = read_embeddings((dir / "test_embeddings.tsv").string());
  d.cohort = read_embeddings((dir / "cohort_embeddings.tsv").string());
  d.enroll_map = read_enroll_map((dir / "enroll_map.tsv").string());
  d.trials = read_trials((dir / "trials.tsv").string());
  d.durations = read_quality_table((dir / "durations.tsv").string());
  return d;
}

}  // namespace asvback

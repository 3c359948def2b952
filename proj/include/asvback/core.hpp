// asvback/core.hpp

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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "asvback/error.hpp"

namespace asvback {

using Vector = std::vector<double>;
using ConstVectorView = std::span<const double>;

/// One utterance (or speaker-averaged) embedding. All arithmetic on
/// embeddings is carried out in double precision.
struct Embedding {
  std::string id;
  Vector values;

  std::size_t dim() const { return values.size(); }
  bool operator==(const Embedding&) const = default;
};

inline void check_same_dim(ConstVectorView a, ConstVectorView b) {
  if (a.size() != b.size())
    throw DataError("dimension mismatch: " + std::to_string(a.size()) +
                    " vs " + std::to_string(b.size()));
}

inline double dot(ConstVectorView a, ConstVectorView b) {
  check_same_dim(a, b);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double l2_norm(ConstVectorView v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

/// Cosine similarity, clamped to [-1, 1]. Zero-norm inputs are an error,
/// never a silent zero score.
inline double cosine(ConstVectorView a, ConstVectorView b) {
  check_same_dim(a, b);
  if (a.empty()) throw DataError("cosine of empty vectors");
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (na == 0.0 || nb == 0.0) throw NumericError("cosine of a zero-norm vector");
  const double c = dot(a, b) / (na * nb);
  return std::clamp(c, -1.0, 1.0);
}

inline double mean(ConstVectorView v) {
  if (v.empty()) throw DataError("mean of an empty vector");
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

/// Population standard deviation (divides by N). Every STD in the
/// library goes through here.
inline double population_std(ConstVectorView v) {
  if (v.size() < 2)
    throw DataError("standard deviation needs at least 2 values, got " +
                    std::to_string(v.size()));
  const double m = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

struct DimStats {
  double l1 = 0.0;
  double l2 = 0.0;
  double std = 0.0;
};

inline DimStats dim_stats(ConstVectorView v) {
  DimStats s;
  for (double x : v) s.l1 += std::abs(x);
  s.l2 = l2_norm(v);
  s.std = population_std(v);
  return s;
}

inline bool all_finite(ConstVectorView v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

/// Logistic sigmoid, evaluated without overflow for large |x|.
inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace asvback

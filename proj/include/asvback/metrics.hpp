// asvback/metrics.hpp

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
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "asvback/error.hpp"
#include "asvback/io.hpp"

namespace asvback {

struct DcfParams {
  double c_miss = 1.0;
  double c_fa = 1.0;
  double p_target = 0.5;
};

/// Day and Night operating conditions of the challenge.
inline constexpr DcfParams kDayDcf{1.0, 20.0, 0.8};
inline constexpr DcfParams kNightDcf{10.0, 100.0, 0.01};

/// One operating point: trials with score >= threshold are accepted.
struct RocPoint {
  double threshold = 0.0;
  double p_miss = 0.0;
  double p_fa = 0.0;
};

struct OperatingPoint {
  double value = 0.0;
  double threshold = 0.0;
};

namespace detail {

inline void check_scores_labels(std::span<const double> scores, std::span<const Label> labels) {
  if (scores.size() != labels.size())
    throw DataError("got " + std::to_string(scores.size()) + " scores but " +
                    std::to_string(labels.size()) + " labels");
  for (double s : scores)
    if (!std::isfinite(s)) throw NumericError("non-finite score");
  const auto nt = std::count(labels.begin(), labels.end(), Label::target);
  if (nt == 0 || nt == static_cast<std::ptrdiff_t>(labels.size()))
    throw NumericError("both target and nontarget trials are required");
}

}  // namespace detail

/// Step ROC with one point per distinct score (ascending), followed by a
/// reject-all point whose threshold is just above the largest score.
inline std::vector<RocPoint> roc(std::span<const double> scores, std::span<const Label> labels) {
  detail::check_scores_labels(scores, labels);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  std::size_t n_tar = 0;
  for (auto l : labels) n_tar += l == Label::target;
  const std::size_t n_non = n - n_tar;
  const double tar = static_cast<double>(n_tar);
  const double non = static_cast<double>(n_non);

  std::vector<RocPoint> out;
  std::size_t tar_below = 0;
  std::size_t non_below = 0;
  std::size_t i = 0;
  while (i < n) {
    const double thr = scores[order[i]];
    out.push_back({thr, static_cast<double>(tar_below) / tar,
                   static_cast<double>(n_non - non_below) / non});
    while (i < n && scores[order[i]] == thr) {
      if (labels[order[i]] == Label::target) ++tar_below;
      else ++non_below;
      ++i;
    }
  }
  const double top = scores[order[n - 1]];
  out.push_back({std::nextafter(top, std::numeric_limits<double>::infinity()), 1.0, 0.0});
  return out;
}

/// Equal error rate, linearly interpolated between the two ROC points
/// where p_miss - p_fa changes sign. The threshold is interpolated the
/// same way.
inline OperatingPoint eer(std::span<const double> scores, std::span<const Label> labels) {
  const auto pts = roc(scores, labels);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = pts[i].p_miss - pts[i].p_fa;
    if (d == 0.0) return {pts[i].p_miss, pts[i].threshold};
    if (d > 0.0) {
      // pts[0] is accept-all, so d < 0 there and i >= 1.
      const auto& a = pts[i - 1];
      const auto& b = pts[i];
      const double da = a.p_miss - a.p_fa;
      const double alpha = -da / (d - da);
      return {a.p_miss + alpha * (b.p_miss - a.p_miss),
              a.threshold + alpha * (b.threshold - a.threshold)};
    }
  }
  // Unreachable: the reject-all point always has p_miss - p_fa == 1.
  return {pts.back().p_miss, pts.back().threshold};
}

/// Minimum detection cost over the ROC points. With `normalize`, the cost
/// is divided by that of the best trial-independent decision,
/// min(c_miss * p_target, c_fa * (1 - p_target)). Ties resolve to the
/// lowest threshold.
inline OperatingPoint min_dcf(std::span<const double> scores, std::span<const Label> labels,
                              const DcfParams& params, bool normalize = true) {
  if (!(params.c_miss > 0.0) || !(params.c_fa > 0.0) || !(params.p_target > 0.0) ||
      !(params.p_target < 1.0))
    throw DataError("invalid DCF parameters");
  const auto pts = roc(scores, labels);
  const double w_miss = params.c_miss * params.p_target;
  const double w_fa = params.c_fa * (1.0 - params.p_target);
  const double norm = normalize ? std::min(w_miss, w_fa) : 1.0;
  OperatingPoint best{std::numeric_limits<double>::infinity(), 0.0};
  for (const auto& p : pts) {
    const double c = (w_miss * p.p_miss + w_fa * p.p_fa) / norm;
    if (c < best.value) best = {c, p.threshold};
  }
  return best;
}

/// Average of the Day and Night minimum DCFs.
inline double dcf_c(std::span<const double> scores, std::span<const Label> labels,
                    bool normalize = true) {
  return 0.5 * (min_dcf(scores, labels, kDayDcf, normalize).value +
                min_dcf(scores, labels, kNightDcf, normalize).value);
}

/// Labels of `trials` after checking that `scores` lists the same trials
/// in the same order.
inline std::vector<Label> aligned_labels(const ScoreFile& scores, const TrialList& trials) {
  if (scores.size() != trials.size())
    throw DataError("score file has " + std::to_string(scores.size()) + " entries, trial list has " +
                    std::to_string(trials.size()));
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto& s = scores.entries[i];
    const auto& t = trials.entries[i];
    if (s.enroll_id != t.enroll_id || s.test_id != t.test_id)
      throw DataError("score line " + std::to_string(i + 1) + " (" + s.enroll_id + " " + s.test_id +
                      ") does not match trial (" + t.enroll_id + " " + t.test_id + ")");
  }
  return trials.labels();
}

}  // namespace asvback

// asvback/augment.hpp

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

// Waveform corruption for training and validation data: speech placed in a
// longer noise window, optional reverberation, additive noise (babble or
// recorded noise) at a random SNR, and optional hard clipping.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "asvback/error.hpp"
#include "asvback/io.hpp"
#include "asvback/random.hpp"
#include "asvback/wav.hpp"

namespace asvback {

inline double rms(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc / static_cast<double>(x.size()));
}

inline double peak(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

/// 20 log10(rms(signal) / rms(noise)), both over their full length.
inline double measure_snr_db(std::span<const double> signal, std::span<const double> noise) {
  return 20.0 * std::log10(rms(signal) / rms(noise));
}

/// Gain that brings `noise` to `snr_db` below `speech`.
inline double snr_gain(const Waveform& speech, const Waveform& noise, double snr_db) {
  const double rs = rms(speech.samples);
  const double rn = rms(noise.samples);
  if (rs == 0.0 || rn == 0.0) throw NumericError("cannot mix at an SNR with a zero-RMS signal");
  return rs / rn * std::pow(10.0, -snr_db / 20.0);
}

/// speech + g * noise with g chosen so that the speech-to-scaled-noise
/// ratio is `snr_db`, measured over the whole (equal) length.
inline Waveform mix_at_snr(const Waveform& speech, const Waveform& noise, double snr_db) {
  if (speech.size() != noise.size())
    throw DataError("speech and noise lengths differ: " + std::to_string(speech.size()) + " vs " +
                    std::to_string(noise.size()));
  const double g = snr_gain(speech, noise, snr_db);
  Waveform out = speech;
  for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] += g * noise.samples[i];
  return out;
}

/// A random `length`-sample excerpt of `source`; sources shorter than
/// `length` are repeated.
inline Waveform random_excerpt(const Waveform& source, std::size_t length, Rng& rng) {
  if (source.samples.empty()) throw DataError("empty noise source");
  Waveform out{std::vector<double>(length), source.sample_rate};
  std::size_t start = 0;
  if (source.size() > length)
    start = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(source.size() - length)));
  for (std::size_t i = 0; i < length; ++i) out.samples[i] = source.samples[(start + i) % source.size()];
  return out;
}

inline constexpr int kMinBabble = 3;
inline constexpr int kMaxBabble = 7;

/// Sum of `count` distinct, randomly chosen and randomly cropped sources.
/// Each excerpt is scaled to the mean RMS of the chosen excerpts before
/// summation; silent excerpts are added as-is.
inline Waveform make_babble(std::span<const Waveform> sources, int count, std::size_t length, Rng& rng) {
  if (count < kMinBabble || count > kMaxBabble)
    throw DataError("babble count must be in [3, 7], got " + std::to_string(count));
  if (sources.size() < static_cast<std::size_t>(count))
    throw DataError("babble needs " + std::to_string(count) + " sources, got " +
                    std::to_string(sources.size()));
  std::vector<std::size_t> idx(sources.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  // Partial Fisher-Yates: the first `count` entries are the draw.
  for (std::size_t i = 0; i < static_cast<std::size_t>(count); ++i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(i),
                                                            static_cast<std::int64_t>(idx.size()) - 1));
    std::swap(idx[i], idx[j]);
  }
  std::vector<Waveform> parts;
  double level = 0.0;
  for (int i = 0; i < count; ++i) {
    parts.push_back(random_excerpt(sources[idx[static_cast<std::size_t>(i)]], length, rng));
    level += rms(parts.back().samples);
  }
  level /= count;
  Waveform out{std::vector<double>(length, 0.0), sources.front().sample_rate};
  for (const auto& p : parts) {
    const double r = rms(p.samples);
    const double g = r > 0.0 ? level / r : 1.0;
    for (std::size_t i = 0; i < length; ++i) out.samples[i] += g * p.samples[i];
  }
  return out;
}

/// Hard clip to [-t, t].
inline Waveform clip_to_threshold(const Waveform& speech, double t) {
  Waveform out = speech;
  for (double& v : out.samples) v = std::clamp(v, -t, t);
  return out;
}

inline constexpr int kMinClipPercent = 3;
inline constexpr int kMaxClipPercent = 8;

/// Clips at n_percent % of the input's peak magnitude. Silent input is
/// returned unchanged.
inline Waveform clip_amplitude(const Waveform& speech, int n_percent) {
  if (n_percent < kMinClipPercent || n_percent > kMaxClipPercent)
    throw DataError("clip percent must be in [3, 8], got " + std::to_string(n_percent));
  if (speech.samples.empty()) throw DataError("cannot clip an empty waveform");
  const double m = peak(speech.samples);
  if (m == 0.0) return speech;
  return clip_to_threshold(speech, n_percent / 100.0 * m);
}

inline std::size_t seconds_to_samples(double seconds, int sample_rate = kSampleRate) {
  if (!(seconds >= 0.0)) throw DataError("negative duration");
  return static_cast<std::size_t>(std::llround(seconds * sample_rate));
}

struct Placement {
  Waveform window;
  std::size_t offset = 0;
};

/// Zero-padded window of `window_s` seconds with the speech at a uniform
/// random offset.
inline Placement place_speech_in_noise_window(const Waveform& speech, double window_s, Rng& rng) {
  const std::size_t n = seconds_to_samples(window_s, speech.sample_rate);
  if (n < speech.size())
    throw DataError("window of " + std::to_string(n) + " samples is shorter than the speech (" +
                    std::to_string(speech.size()) + ")");
  Placement p{{std::vector<double>(n, 0.0), speech.sample_rate}, 0};
  p.offset = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n - speech.size())));
  std::copy(speech.samples.begin(), speech.samples.end(),
            p.window.samples.begin() + static_cast<std::ptrdiff_t>(p.offset));
  return p;
}

/// Reverberation: full convolution with `rir`, cut to the input length
/// starting at the RIR's largest-magnitude tap (so the direct path stays
/// aligned), then rescaled to the input's peak.
inline Waveform convolve_rir(const Waveform& speech, const Waveform& rir) {
  if (rir.samples.empty()) throw DataError("empty RIR");
  std::size_t p = 0;
  for (std::size_t k = 1; k < rir.size(); ++k)
    if (std::abs(rir.samples[k]) > std::abs(rir.samples[p])) p = k;
  if (rir.samples[p] == 0.0) throw NumericError("all-zero RIR");

  const auto& x = speech.samples;
  const auto& h = rir.samples;
  const std::size_t n = x.size();
  Waveform out{std::vector<double>(n, 0.0), speech.sample_rate};
  for (std::size_t i = 0; i < n; ++i) {
    // y[i + p] = sum_k h[k] x[i + p - k], 0 <= i + p - k < n
    const std::size_t j = i + p;
    const std::size_t k_lo = j >= n ? j - n + 1 : 0;
    const std::size_t k_hi = std::min(h.size() - 1, j);
    double acc = 0.0;
    for (std::size_t k = k_lo; k <= k_hi; ++k) acc += h[k] * x[j - k];
    out.samples[i] = acc;
  }
  const double in_peak = peak(x);
  const double out_peak = peak(out.samples);
  if (out_peak > 0.0) {
    const double g = in_peak / out_peak;
    for (double& v : out.samples) v *= g;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Plans

struct NoiseClass {
  std::string name;
  double snr_lo_db = 0.0;
  double snr_hi_db = 0.0;
  bool enabled = true;
};

struct AugmentPlan {
  double reverb_prob = 0.5;
  double clip_prob = 0.25;
  std::vector<NoiseClass> noise_classes;
  int babble_min = kMinBabble;
  int babble_max = kMaxBabble;
  double speech_dur_s = 1.8;
  double noise_dur_s = 2.4;
  std::uint64_t seed = 0;

  void validate() const {
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob(reverb_prob) || !prob(clip_prob)) throw DataError("probabilities must be in [0, 1]");
    if (!(speech_dur_s > 0.0) || !(noise_dur_s >= speech_dur_s))
      throw DataError("need 0 < speech_dur_s <= noise_dur_s");
    if (babble_min < kMinBabble || babble_max > kMaxBabble || babble_min > babble_max)
      throw DataError("babble count range must lie within [3, 7]");
    for (const auto& c : noise_classes)
      if (!(c.snr_lo_db <= c.snr_hi_db)) throw DataError("noise class '" + c.name + "': snr lo > hi");
  }
};

/// Babble 13-20 dB, music 5-15 dB (disabled), noise -3-15 dB, and a
/// disabled slot for recorded target-domain noise at -3-15 dB; reverb 0.5,
/// clipping 0.25; 1.8 s of speech inside a 2.4 s window.
inline AugmentPlan default_plan() {
  AugmentPlan p;
  p.noise_classes = {{"babble", 13.0, 20.0, true},
                     {"music", 5.0, 15.0, false},
                     {"noise", -3.0, 15.0, true},
                     {"robovox", -3.0, 15.0, false}};
  return p;
}

/// Plan file: `key<TAB>value` lines overriding default_plan(). Keys:
/// reverb_prob, clip_prob, speech_dur_s, noise_dur_s, babble_min,
/// babble_max, seed, and `noise.<class>` with value `<lo> <hi> <0|1>`.
inline AugmentPlan read_plan(const std::string& path) {
  AugmentPlan p = default_plan();
  for (const auto& [key, value] : read_key_values(path)) {
    auto num = [&](const std::string& v) {
      auto d = detail::parse_double(v);
      if (!d) throw DataError(path + ": invalid value '" + v + "' for '" + key + "'");
      return *d;
    };
    if (key == "reverb_prob") p.reverb_prob = num(value);
    else if (key == "clip_prob") p.clip_prob = num(value);
    else if (key == "speech_dur_s") p.speech_dur_s = num(value);
    else if (key == "noise_dur_s") p.noise_dur_s = num(value);
    else if (key == "babble_min") p.babble_min = static_cast<int>(num(value));
    else if (key == "babble_max") p.babble_max = static_cast<int>(num(value));
    else if (key == "seed") p.seed = static_cast<std::uint64_t>(num(value));
    else if (key.rfind("noise.", 0) == 0) {
      auto parts = detail::split(value, ' ');
      if (parts.size() != 3 || (parts[2] != "0" && parts[2] != "1"))
        throw DataError(path + ": '" + key + "' needs '<lo> <hi> <0|1>'");
      NoiseClass c{key.substr(6), num(std::string(parts[0])), num(std::string(parts[1])), parts[2] == "1"};
      auto it = std::find_if(p.noise_classes.begin(), p.noise_classes.end(),
                             [&](const NoiseClass& n) { return n.name == c.name; });
      if (it != p.noise_classes.end()) *it = c;
      else p.noise_classes.push_back(c);
    } else {
      throw DataError(path + ": unknown plan key '" + key + "'");
    }
  }
  p.validate();
  return p;
}

/// Noise material per class name, plus RIRs. The class named "babble" is
/// built from several speech sources at once.
struct AugmentSources {
  std::map<std::string, std::vector<Waveform>> noise;
  std::vector<Waveform> rirs;
};

struct AugmentResult {
  Waveform audio;
  /// Applied operations, in order of application.
  std::vector<std::pair<std::string, std::string>> metadata;
};

/// Crop to speech_dur_s, place in a noise_dur_s window, then optionally
/// reverberate, add noise from one enabled class, and clip. Random draws
/// come from Rng(plan.seed) in a fixed order, so results depend only on
/// the inputs and the seed.
inline AugmentResult apply_plan(const Waveform& speech, const AugmentPlan& plan,
                                const AugmentSources& sources) {
  plan.validate();
  if (speech.samples.empty()) throw DataError("empty input waveform");
  Rng rng(plan.seed);
  AugmentResult r;
  auto note = [&](std::string k, std::string v) { r.metadata.emplace_back(std::move(k), std::move(v)); };
  note("seed", std::to_string(plan.seed));

  std::vector<const NoiseClass*> enabled;
  for (const auto& c : plan.noise_classes) {
    if (!c.enabled) continue;
    auto it = sources.noise.find(c.name);
    if (it == sources.noise.end() || it->second.empty())
      throw DataError("noise class '" + c.name + "' is enabled but has no source material");
    enabled.push_back(&c);
  }

  // Decisions are drawn first.
  const bool do_reverb = rng.bernoulli(plan.reverb_prob);
  const bool do_clip = rng.bernoulli(plan.clip_prob);
  if (do_reverb && sources.rirs.empty()) throw DataError("reverberation drawn but no RIRs supplied");

  Waveform s = speech;
  const std::size_t speech_len = seconds_to_samples(plan.speech_dur_s, speech.sample_rate);
  std::size_t crop = 0;
  if (s.size() > speech_len) {
    crop = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(s.size() - speech_len)));
    s.samples.assign(speech.samples.begin() + static_cast<std::ptrdiff_t>(crop),
                     speech.samples.begin() + static_cast<std::ptrdiff_t>(crop + speech_len));
  }
  note("crop_start", std::to_string(crop));
  auto placed = place_speech_in_noise_window(s, plan.noise_dur_s, rng);
  note("speech_offset", std::to_string(placed.offset));
  note("window_samples", std::to_string(placed.window.size()));
  Waveform out = std::move(placed.window);

  note("reverb", do_reverb ? "1" : "0");
  if (do_reverb) {
    const auto k = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(sources.rirs.size()) - 1));
    out = convolve_rir(out, sources.rirs[k]);
    note("rir_index", std::to_string(k));
  }

  if (enabled.empty()) {
    note("noise_class", "none");
  } else {
    const auto* cls = enabled[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(enabled.size()) - 1))];
    const auto& material = sources.noise.at(cls->name);
    const double snr = rng.uniform(cls->snr_lo_db, cls->snr_hi_db);
    note("noise_class", cls->name);
    Waveform noise;
    if (cls->name == "babble") {
      const int count = static_cast<int>(rng.uniform_int(plan.babble_min, plan.babble_max));
      noise = make_babble(material, count, out.size(), rng);
      note("babble_count", std::to_string(count));
    } else {
      const auto k = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(material.size()) - 1));
      noise = random_excerpt(material[k], out.size(), rng);
      note("noise_index", std::to_string(k));
    }
    out = mix_at_snr(out, noise, snr);
    note("snr_db", format_double(snr));
  }

  note("clip", do_clip ? "1" : "0");
  if (do_clip) {
    const int n = static_cast<int>(rng.uniform_int(kMinClipPercent, kMaxClipPercent));
    out = clip_amplitude(out, n);
    note("clip_percent", std::to_string(n));
  }
  r.audio = std::move(out);
  return r;
}

}  // namespace asvback

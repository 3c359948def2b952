// tests/augment_test.cpp

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
#include <vector>

#include "asvback/augment.hpp"
#include "test_util.hpp"

using namespace asvback;

namespace {

Waveform noise_wave(Rng& rng, std::size_t n, double scale = 0.1) {
  Waveform w;
  w.samples.resize(n);
  for (auto& x : w.samples) x = scale * rng.normal();
  return w;
}

Waveform tone(std::size_t n, double amp, double freq) {
  Waveform w;
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) w.samples[i] = amp * std::sin(2 * M_PI * freq * static_cast<double>(i) / kSampleRate);
  return w;
}

AugmentSources sources(Rng& rng) {
  AugmentSources s;
  for (int i = 0; i < 8; ++i) s.noise["babble"].push_back(noise_wave(rng, 20000 + 1000 * i, 0.05 * (i + 1)));
  for (int i = 0; i < 3; ++i) s.noise["noise"].push_back(noise_wave(rng, 50000, 0.2));
  for (int i = 0; i < 3; ++i) {
    Waveform r = noise_wave(rng, 400, 0.01);
    r.samples[10 + i] = 1.0;
    for (std::size_t k = 11 + i; k < r.size(); ++k) r.samples[k] *= std::exp(-0.01 * static_cast<double>(k));
    s.rirs.push_back(r);
  }
  return s;
}

}  // namespace

TEST(Mix, GainExamples) {
  Waveform a{{1, -1, 1, -1}}, b{{-1, 1, 1, -1}};
  EXPECT_EQ(snr_gain(a, b, 0.0), 1.0);
  EXPECT_NEAR(snr_gain(a, b, 20.0), 0.1, 1e-15);
  const auto m = mix_at_snr(a, b, 0.0);
  EXPECT_EQ(m.samples, (std::vector<double>{0, 0, 2, -2}));
}

TEST(Mix, MeasuredSnrMatchesRequest) {
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    const auto s = tone(16000, rng.uniform(0.05, 0.9), rng.uniform(100, 4000));
    const auto n = noise_wave(rng, 16000, rng.uniform(0.001, 0.5));
    const double snr = rng.uniform(-3, 20);
    const double g = snr_gain(s, n, snr);
    std::vector<double> scaled = n.samples;
    for (auto& x : scaled) x *= g;
    ASSERT_NEAR(measure_snr_db(s.samples, scaled), snr, 0.05);
    const auto mixed = mix_at_snr(s, n, snr);
    std::vector<double> diff(mixed.size());
    for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = mixed.samples[k] - s.samples[k];
    ASSERT_NEAR(measure_snr_db(s.samples, diff), snr, 0.05);
  }
}

TEST(Mix, Errors) {
  Waveform a{{1, 1}}, z{{0, 0}}, shorter{{1}};
  EXPECT_THROW(mix_at_snr(a, z, 0), NumericError);
  EXPECT_THROW(mix_at_snr(a, shorter, 0), DataError);
}

TEST(Clip, ThresholdAndIdempotence) {
  Waveform w{{0.5, -1.0, 0.01, 0.2}};
  const auto c = clip_amplitude(w, 8);
  EXPECT_EQ(peak(c.samples), 0.08);
  EXPECT_EQ(c.samples, (std::vector<double>{0.08, -0.08, 0.01, 0.08}));

  Waveform small{{0.01, -0.02}};
  EXPECT_EQ(clip_to_threshold(small, 0.05), small);
  EXPECT_THROW(clip_amplitude(w, 2), DataError);
  EXPECT_THROW(clip_amplitude(w, 9), DataError);

  Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    const auto x = noise_wave(rng, 1000, rng.uniform(0.01, 1));
    const int n = static_cast<int>(rng.uniform_int(3, 8));
    const double t = n / 100.0 * peak(x.samples);
    const auto once = clip_amplitude(x, n);
    for (std::size_t k = 0; k < x.size(); ++k) {
      ASSERT_LE(std::abs(once.samples[k]), t);
      const double ref = x.samples[k] > t ? t : x.samples[k] < -t ? -t : x.samples[k];
      ASSERT_EQ(once.samples[k], ref);
    }
    ASSERT_EQ(clip_to_threshold(once, t), once);
  }
}

TEST(Place, LengthAndOffset) {
  Rng rng(9);
  const auto s = tone(28800, 0.5, 300);
  const auto p = place_speech_in_noise_window(s, 2.4, rng);
  EXPECT_EQ(p.window.size(), 38400u);
  EXPECT_LE(p.offset, 9600u);
  for (std::size_t i = 0; i < s.size(); ++i) ASSERT_EQ(p.window.samples[p.offset + i], s.samples[i]);

  const auto same = place_speech_in_noise_window(s, 1.8, rng);
  EXPECT_EQ(same.offset, 0u);
  EXPECT_EQ(same.window, s);

  Rng a(5), b(5);
  EXPECT_EQ(place_speech_in_noise_window(s, 2.4, a).offset, place_speech_in_noise_window(s, 2.4, b).offset);
  EXPECT_THROW(place_speech_in_noise_window(s, 1.0, rng), DataError);
}

TEST(Reverb, ImpulseIsIdentity) {
  Rng rng(10);
  const auto x = noise_wave(rng, 5000, 0.3);
  const auto y = convolve_rir(x, Waveform{{1.0}});
  for (std::size_t i = 0; i < x.size(); ++i) ASSERT_NEAR(y.samples[i], x.samples[i], 1e-9);
  const auto delayed = convolve_rir(x, Waveform{{0, 0, 0.5, 0}});
  for (std::size_t i = 0; i < x.size(); ++i) ASSERT_NEAR(delayed.samples[i], x.samples[i], 1e-9);
  EXPECT_THROW(convolve_rir(x, Waveform{{0, 0}}), NumericError);
  EXPECT_THROW(convolve_rir(x, Waveform{}), DataError);
}

TEST(Reverb, MatchesNaiveConvolution) {
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    const auto x = noise_wave(rng, static_cast<std::size_t>(rng.uniform_int(50, 400)), 0.3);
    const auto h = noise_wave(rng, static_cast<std::size_t>(rng.uniform_int(1, 80)), 1.0);
    std::vector<double> full(x.size() + h.size() - 1, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t k = 0; k < h.size(); ++k) full[i + k] += x.samples[i] * h.samples[k];
    std::size_t p = 0;
    for (std::size_t k = 0; k < h.size(); ++k)
      if (std::abs(h.samples[k]) > std::abs(h.samples[p])) p = k;
    std::vector<double> cut(full.begin() + static_cast<std::ptrdiff_t>(p),
                            full.begin() + static_cast<std::ptrdiff_t>(p + x.size()));
    const double g = peak(x.samples) / peak(cut);
    const auto y = convolve_rir(x, h);
    ASSERT_EQ(y.size(), x.size());
    ASSERT_NEAR(peak(y.samples), peak(x.samples), 1e-12);
    for (std::size_t i = 0; i < cut.size(); ++i) ASSERT_NEAR(y.samples[i], g * cut[i], 1e-12);
  }
}

TEST(Babble, BoundsCountAndDeterminism) {
  Rng rng(12);
  // Constant sources: every excerpt is identical.
  const Waveform src{std::vector<double>(16000, 0.2)};
  const std::vector<Waveform> same(3, src);
  const double single = rms(src.samples);
  const auto b = make_babble(same, 3, 8000, rng);
  EXPECT_GE(rms(b.samples), single * (1 - 1e-12));
  EXPECT_LE(rms(b.samples), 3 * single * (1 + 1e-12));

  std::vector<Waveform> many;
  for (int i = 0; i < 8; ++i) many.push_back(noise_wave(rng, 12000, 0.1 * (i + 1)));
  for (int count = 3; count <= 7; ++count) {
    const auto mixed = make_babble(many, count, 8000, rng);
    double loudest = 0;
    for (const auto& w : many) loudest = std::max(loudest, rms(w.samples));
    EXPECT_LE(rms(mixed.samples), count * loudest);
  }
  EXPECT_THROW(make_babble(many, 2, 100, rng), DataError);
  EXPECT_THROW(make_babble(many, 8, 100, rng), DataError);
  EXPECT_THROW(make_babble(same, 4, 100, rng), DataError);
  Rng r1(99), r2(99);
  EXPECT_EQ(make_babble(many, 5, 16000, r1), make_babble(many, 5, 16000, r2));
  // Short sources are tiled.
  EXPECT_EQ(make_babble(many, 7, 30000, r1).size(), 30000u);
}

TEST(Plan, IdentityWhenNothingApplies) {
  AugmentPlan plan;
  plan.reverb_prob = 0;
  plan.clip_prob = 0;
  plan.speech_dur_s = 1.0;
  plan.noise_dur_s = 1.0;
  Rng rng(13);
  const auto s = tone(16000, 0.3, 200);
  const auto r = apply_plan(s, plan, {});
  EXPECT_EQ(r.audio, s);
}

TEST(Plan, DeterministicUnderSeed) {
  Rng rng(14);
  const auto src = sources(rng);
  const auto s = tone(32000, 0.3, 220);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto plan = default_plan();
    plan.seed = seed;
    plan.clip_prob = 0.5;
    const auto a = apply_plan(s, plan, src);
    const auto b = apply_plan(s, plan, src);
    ASSERT_EQ(a.audio, b.audio);
    ASSERT_EQ(a.metadata, b.metadata);
    ASSERT_EQ(a.audio.size(), 38400u);
  }
}

TEST(Plan, ReverbRateMatchesProbability) {
  Rng rng(15);
  AugmentSources src;
  src.rirs.push_back(Waveform{{1.0, 0.3}});
  const auto s = tone(64, 0.3, 1000);
  AugmentPlan plan;
  plan.speech_dur_s = 64.0 / kSampleRate;
  plan.noise_dur_s = 64.0 / kSampleRate;
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    plan.seed = seed;
    for (const auto& [k, v] : apply_plan(s, plan, src).metadata)
      if (k == "reverb" && v == "1") ++hits;
  }
  EXPECT_GE(hits, 4800);
  EXPECT_LE(hits, 5200);
}

TEST(Plan, MissingMaterialIsAnError) {
  auto plan = default_plan();
  EXPECT_THROW(apply_plan(tone(32000, 0.3, 220), plan, {}), DataError);
  plan.noise_classes.push_back({"bogus", 30, 10, true});
  EXPECT_THROW(plan.validate(), DataError);
}

TEST(Wav, RoundTrip) {
  const auto dir = testutil::scratch_dir("wav_rt");
  Rng rng(16);
  Waveform w;
  for (int i = -32768; i < 32768; i += 7) w.samples.push_back(i / 32768.0);
  write_wav((dir / "a.wav").string(), w);
  EXPECT_EQ(read_wav((dir / "a.wav").string()), w);

  const auto x = noise_wave(rng, 4000, 0.2);
  Rng d1(1), d2(1);
  write_wav((dir / "b.wav").string(), x, &d1);
  write_wav((dir / "c.wav").string(), x, &d2);
  EXPECT_EQ(testutil::slurp(dir / "b.wav"), testutil::slurp(dir / "c.wav"));
  const auto y = read_wav((dir / "b.wav").string());
  for (std::size_t i = 0; i < x.size(); ++i) ASSERT_LE(std::abs(y.samples[i] - x.samples[i]), 1.5 / 32768.0);
  EXPECT_THROW(read_wav((dir / "missing.wav").string()), DataError);
}

// asvback/wav.hpp

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
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "asvback/error.hpp"
#include "asvback/random.hpp"

namespace asvback {

inline constexpr int kSampleRate = 16000;

/// Mono waveform, samples nominally in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = kSampleRate;

  std::size_t size() const { return samples.size(); }
  double duration_s() const { return static_cast<double>(samples.size()) / sample_rate; }
  bool operator==(const Waveform&) const = default;
};

namespace detail {

inline std::uint32_t get_u32(const unsigned char* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
         std::uint32_t(p[3]) << 24;
}
inline std::uint16_t get_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | p[1] << 8);
}
inline void put_u32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void put_u16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>(v >> 8));
}

}  // namespace detail

/// Reads a 16-bit PCM mono 16 kHz RIFF/WAVE file.
inline Waveform read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "' for reading");
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto fail = [&](const std::string& why) -> DataError { return DataError(path + ": " + why); };
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
    throw fail("not a RIFF/WAVE file");

  bool have_fmt = false;
  Waveform w;
  std::size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const unsigned char* chunk = buf.data() + pos;
    const std::uint32_t size = detail::get_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + size > buf.size()) throw fail("truncated chunk");
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw fail("short fmt chunk");
      const auto* f = buf.data() + body;
      const auto format = detail::get_u16(f);
      const auto channels = detail::get_u16(f + 2);
      const auto rate = detail::get_u32(f + 4);
      const auto bits = detail::get_u16(f + 14);
      if (format != 1) throw fail("only PCM is supported");
      if (channels != 1) throw fail("only mono is supported");
      if (bits != 16) throw fail("only 16-bit samples are supported");
      if (rate != kSampleRate) throw fail("sample rate must be 16000, got " + std::to_string(rate));
      w.sample_rate = static_cast<int>(rate);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) throw fail("data chunk before fmt chunk");
      const std::size_t n = size / 2;
      w.samples.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto v = static_cast<std::int16_t>(detail::get_u16(buf.data() + body + 2 * i));
        w.samples[i] = v / 32768.0;
      }
      return w;
    }
    pos = body + size + (size & 1);
  }
  throw fail("no data chunk");
}

/// Quantizes to 16 bits. With `dither`, adds triangular (TPDF) noise of
/// +-1 LSB before rounding; samples beyond full scale saturate.
inline std::vector<std::int16_t> quantize16(const Waveform& w, Rng* dither) {
  std::vector<std::int16_t> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    double v = w.samples[i] * 32768.0;
    if (dither) v += dither->uniform() - dither->uniform();
    v = std::floor(v + 0.5);
    out[i] = static_cast<std::int16_t>(std::clamp(v, -32768.0, 32767.0));
  }
  return out;
}

inline void write_wav(const std::string& path, const Waveform& w, Rng* dither = nullptr) {
  if (w.sample_rate != kSampleRate) throw DataError("sample rate must be 16000");
  const auto pcm = quantize16(w, dither);
  const auto data_bytes = static_cast<std::uint32_t>(pcm.size() * 2);
  std::string s;
  s.reserve(44 + data_bytes);
  s += "RIFF";
  detail::put_u32(s, 36 + data_bytes);
  s += "WAVEfmt ";
  detail::put_u32(s, 16);
  detail::put_u16(s, 1);
  detail::put_u16(s, 1);
  detail::put_u32(s, kSampleRate);
  detail::put_u32(s, kSampleRate * 2);
  detail::put_u16(s, 2);
  detail::put_u16(s, 16);
  s += "data";
  detail::put_u32(s, data_bytes);
  for (auto v : pcm) detail::put_u16(s, static_cast<std::uint16_t>(v));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
  if (!out) throw DataError("write to '" + path + "' failed");
}

}  // namespace asvback

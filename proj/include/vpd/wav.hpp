// Copyright 2026 The vpd authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "vpd/error.hpp"

namespace vpd {

// Mono audio in [-1, 1].
struct AudioBuffer {
  int sample_rate = 0;
  std::vector<double> samples;

  double duration_seconds() const {
    return sample_rate > 0
               ? static_cast<double>(samples.size()) / sample_rate
               : 0.0;
  }
};

namespace detail {

inline std::uint32_t read_u32le(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint16_t read_u16le(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline void put_u32le(std::string& s, std::uint32_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
  s.push_back(static_cast<char>((v >> 16) & 0xff));
  s.push_back(static_cast<char>((v >> 24) & 0xff));
}

inline void put_u16le(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace detail

// Read a RIFF/WAVE file holding 16-bit PCM mono samples. Unknown chunks are
// skipped; anything that is not 16-bit PCM mono raises FormatError.
inline AudioBuffer read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open wav: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw FormatError("not a RIFF/WAVE file: " + path);
  }
  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t sample_rate = 0;
  const std::uint8_t* data_ptr = nullptr;
  std::uint32_t data_len = 0;
  std::size_t off = 12;
  while (off + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + off);
    const std::uint32_t len = detail::read_u32le(bytes.data() + off + 4);
    const std::size_t body = off + 8;
    if (body + len > bytes.size()) {
      throw FormatError("truncated chunk in wav: " + path);
    }
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (len < 16) throw FormatError("short fmt chunk: " + path);
      format = detail::read_u16le(bytes.data() + body);
      channels = detail::read_u16le(bytes.data() + body + 2);
      sample_rate = detail::read_u32le(bytes.data() + body + 4);
      bits = detail::read_u16le(bytes.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data_ptr = bytes.data() + body;
      data_len = len;
    }
    off = body + len + (len & 1);  // chunks are word-aligned
  }
  if (!have_fmt || data_ptr == nullptr) {
    throw FormatError("missing fmt or data chunk: " + path);
  }
  if (format != 1 || bits != 16) {
    throw FormatError("unsupported wav encoding (want 16-bit PCM): " + path);
  }
  if (channels != 1) {
    throw FormatError("unsupported channel count (want mono): " + path);
  }
  if (sample_rate == 0) throw FormatError("zero sample rate: " + path);
  AudioBuffer buf;
  buf.sample_rate = static_cast<int>(sample_rate);
  const std::size_t n = data_len / 2;
  buf.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::int16_t s = static_cast<std::int16_t>(
        detail::read_u16le(data_ptr + 2 * i));
    buf.samples[i] = static_cast<double>(s) / 32768.0;
  }
  return buf;
}

// Write 16-bit PCM mono; samples are clamped to [-1, 1].
inline void write_wav(const std::string& path, const AudioBuffer& buf) {
  if (buf.sample_rate <= 0) throw ValidationError("write_wav: bad rate");
  std::string out;
  const std::uint32_t n = static_cast<std::uint32_t>(buf.samples.size());
  const std::uint32_t data_len = n * 2;
  out.reserve(44 + data_len);
  out += "RIFF";
  detail::put_u32le(out, 36 + data_len);
  out += "WAVEfmt ";
  detail::put_u32le(out, 16);
  detail::put_u16le(out, 1);  // PCM
  detail::put_u16le(out, 1);  // mono
  detail::put_u32le(out, static_cast<std::uint32_t>(buf.sample_rate));
  detail::put_u32le(out, static_cast<std::uint32_t>(buf.sample_rate) * 2);
  detail::put_u16le(out, 2);   // block align
  detail::put_u16le(out, 16);  // bits
  out += "data";
  detail::put_u32le(out, data_len);
  for (std::uint32_t i = 0; i < n; ++i) {
    // Encode with the same 32768 scale the reader divides by, so a write
    // and read pair is exact up to half a quantization step.
    const double scaled = buf.samples[i] * 32768.0;
    int s = static_cast<int>(scaled >= 0.0 ? std::floor(scaled + 0.5)
                                           : std::ceil(scaled - 0.5));
    if (s > 32767) s = 32767;
    if (s < -32768) s = -32768;
    detail::put_u16le(out, static_cast<std::uint16_t>(
                               static_cast<std::int16_t>(s)));
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write wav: " + path);
  f << out;
  if (!f) throw IoError("short write: " + path);
}

}  // namespace vpd

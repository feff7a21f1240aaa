// Copyright 2026 The oversmooth Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "oversmooth/dsp/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "oversmooth/core/binary_io.hpp"
#include "oversmooth/core/error.hpp"

namespace oversmooth::dsp {
namespace {

std::uint32_t le32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::uint16_t le16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

constexpr std::uint16_t kFormatPcm = 1;

}  // namespace

AudioClip decode_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(ErrorCode::kBadMagic, "not a RIFF/WAVE file");
  }
  bool have_fmt = false;
  std::uint16_t channels = 0;
  std::uint16_t bits = 0;
  std::uint32_t rate = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const std::uint32_t size = le32(chunk + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || body + 16 > bytes.size()) throw Error(ErrorCode::kTruncated, "fmt chunk truncated");
      const std::uint16_t format = le16(bytes.data() + body);
      channels = le16(bytes.data() + body + 2);
      rate = le32(bytes.data() + body + 4);
      bits = le16(bytes.data() + body + 14);
      if (format != kFormatPcm) {
        throw Error(ErrorCode::kUnsupportedFormat, "WAV format tag " + std::to_string(format) + " is not PCM");
      }
      if (bits != 16) {
        throw Error(ErrorCode::kUnsupportedFormat, std::to_string(bits) + "-bit PCM is not supported");
      }
      if (channels != 1) {
        throw Error(ErrorCode::kUnsupportedChannels, std::to_string(channels) + " channels; only mono is supported");
      }
      if (rate == 0) throw Error(ErrorCode::kUnsupportedFormat, "sample rate is zero");
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) throw Error(ErrorCode::kUnsupportedFormat, "data chunk before fmt chunk");
      if (body + size > bytes.size() || size % 2 != 0) {
        throw Error(ErrorCode::kTruncated, "data chunk declares " + std::to_string(size) + " bytes, " +
                                               std::to_string(bytes.size() - std::min(body, bytes.size())) +
                                               " available");
      }
      AudioClip clip;
      clip.sample_rate = rate;
      clip.samples.resize(size / 2);
      for (std::size_t i = 0; i < clip.samples.size(); ++i) {
        const auto raw = static_cast<std::int16_t>(le16(bytes.data() + body + 2 * i));
        clip.samples[i] = raw / 32768.0;
      }
      return clip;
    }
    pos = body + size + (size & 1u);
  }
  throw Error(ErrorCode::kTruncated, have_fmt ? "no data chunk" : "no fmt chunk");
}

AudioClip read_wav(const std::filesystem::path& path) { return decode_wav(read_file_bytes(path)); }

std::vector<std::uint8_t> encode_wav_pcm16(const AudioClip& clip) {
  const auto data_bytes = static_cast<std::uint32_t>(clip.samples.size() * 2);
  const auto rate = static_cast<std::uint32_t>(std::lround(clip.sample_rate));
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put32(out, 36 + data_bytes);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put32(out, 16);
  put16(out, kFormatPcm);
  put16(out, 1);
  put32(out, rate);
  put32(out, rate * 2);
  put16(out, 2);
  put16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put32(out, data_bytes);
  for (double s : clip.samples) {
    const double scaled = std::clamp(std::round(s * 32768.0), -32768.0, 32767.0);
    put16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
  }
  return out;
}

void write_wav(const AudioClip& clip, const std::filesystem::path& path) {
  write_file_bytes(path, encode_wav_pcm16(clip));
}

}  // namespace oversmooth::dsp

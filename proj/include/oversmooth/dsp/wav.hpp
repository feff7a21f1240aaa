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

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace oversmooth::dsp {

/// Mono audio with samples nominally in [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  double sample_rate = 0.0;
};

/// Decodes RIFF/WAVE, PCM 16-bit mono. Samples are scaled by 1/32768.
AudioClip decode_wav(std::span<const std::uint8_t> bytes);
AudioClip read_wav(const std::filesystem::path& path);

/// Encodes a clip as PCM 16-bit mono, clamping to the representable range.
std::vector<std::uint8_t> encode_wav_pcm16(const AudioClip& clip);
void write_wav(const AudioClip& clip, const std::filesystem::path& path);

}  // namespace oversmooth::dsp

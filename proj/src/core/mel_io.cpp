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

#include "oversmooth/core/mel_io.hpp"

#include <cmath>
#include <string>

#include "oversmooth/core/binary_io.hpp"
#include "oversmooth/core/error.hpp"

namespace oversmooth {

std::vector<std::uint8_t> encode_mel(const Spectrogram& spec) {
  ByteWriter w;
  w.magic("MEL1");
  w.u32(static_cast<std::uint32_t>(spec.frames()));
  w.u32(static_cast<std::uint32_t>(spec.bins()));
  w.f32s(spec.values());
  return w.bytes();
}

Spectrogram decode_mel(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.expect_magic("MEL1");
  const std::uint64_t frames = r.u32();
  const std::uint64_t bins = r.u32();
  const std::uint64_t payload = r.remaining();
  if (bins == 0 || frames * bins * 4 != payload) {
    throw Error(ErrorCode::kDimensionMismatch,
                "header says " + std::to_string(frames) + "x" + std::to_string(bins) +
                    " but payload holds " + std::to_string(payload) + " bytes");
  }
  std::vector<float> values = r.f32s(frames * bins);
  for (float v : values) {
    if (std::isnan(v) || std::isinf(v)) throw Error(ErrorCode::kNonFinite, "MEL1 payload has a non-finite value");
  }
  return Spectrogram(frames, bins, std::move(values));
}

void write_mel(const Spectrogram& spec, const std::filesystem::path& path) {
  write_file_bytes(path, encode_mel(spec));
}

Spectrogram read_mel(const std::filesystem::path& path) { return decode_mel(read_file_bytes(path)); }

}  // namespace oversmooth

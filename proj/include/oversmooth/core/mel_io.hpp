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

#include "oversmooth/core/spectrogram.hpp"

namespace oversmooth {

// MEL1 container: "MEL1" | u32 T | u32 F | T*F float32, all little-endian,
// time-major. A T x F file is exactly 12 + 4*T*F bytes.

std::vector<std::uint8_t> encode_mel(const Spectrogram& spec);
Spectrogram decode_mel(std::span<const std::uint8_t> bytes);

void write_mel(const Spectrogram& spec, const std::filesystem::path& path);
Spectrogram read_mel(const std::filesystem::path& path);

}  // namespace oversmooth

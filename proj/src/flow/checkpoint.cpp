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

#include "oversmooth/flow/flow.hpp"

#include <string>

#include "oversmooth/core/binary_io.hpp"
#include "oversmooth/core/error.hpp"

namespace oversmooth::flow {
namespace {

constexpr std::string_view kMagic = "FLW1";

}  // namespace

std::vector<std::uint8_t> encode_flow(const FlowModel& model) {
  if (!model.initialized()) throw Error(ErrorCode::kUninitialized, "refusing to save an uninitialized flow");
  const auto& cfg = model.config();
  ByteWriter w;
  w.magic(kMagic);
  for (std::size_t v : {cfg.steps, cfg.channels, cfg.cond_dim, cfg.frames, cfg.hidden}) {
    w.u32(static_cast<std::uint32_t>(v));
  }
  const auto params = model.parameters();
  const std::vector<float> narrow(params.begin(), params.end());
  w.f32s(narrow);
  return w.bytes();
}

FlowModel decode_flow(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.expect_magic(kMagic);
  FlowConfig cfg;
  cfg.steps = r.u32();
  cfg.channels = r.u32();
  cfg.cond_dim = r.u32();
  cfg.frames = r.u32();
  cfg.hidden = r.u32();
  FlowModel model(cfg);
  const std::size_t n = model.parameter_count();
  if (r.remaining() != 4 * n) {
    throw Error(ErrorCode::kDimensionMismatch, "FLW1 payload holds " + std::to_string(r.remaining()) +
                                                   " bytes, header implies " + std::to_string(4 * n));
  }
  const auto narrow = r.f32s(n);
  const std::vector<double> params(narrow.begin(), narrow.end());
  model.set_parameters(params);
  model.mark_initialized();
  return model;
}

void write_flow(const FlowModel& model, const std::filesystem::path& path) {
  write_file_bytes(path, encode_flow(model));
}

FlowModel read_flow(const std::filesystem::path& path) { return decode_flow(read_file_bytes(path)); }

}  // namespace oversmooth::flow

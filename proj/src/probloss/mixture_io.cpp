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

#include "oversmooth/probloss/mixture.hpp"

#include <cstdio>
#include <string>

#include "oversmooth/core/binary_io.hpp"
#include "oversmooth/core/error.hpp"

namespace oversmooth::probloss {
namespace {

constexpr std::string_view kMagic = "LMF1";

std::vector<float> narrow(std::span<const double> v) { return {v.begin(), v.end()}; }

std::vector<double> widen(const std::vector<float>& v) { return {v.begin(), v.end()}; }

}  // namespace

std::vector<std::uint8_t> encode_mixture(const LaplaceMixtureField& field) {
  ByteWriter w;
  w.magic(kMagic);
  w.u32(static_cast<std::uint32_t>(field.components()));
  w.u32(static_cast<std::uint32_t>(field.frames()));
  w.u32(static_cast<std::uint32_t>(field.bins()));
  w.f32s(narrow(field.weights()));
  w.f32s(narrow(field.means()));
  w.f32s(narrow(field.scales()));
  return w.bytes();
}

LaplaceMixtureField decode_mixture(std::span<const std::uint8_t> bytes, double scale_floor) {
  ByteReader r(bytes);
  r.expect_magic(kMagic);
  const std::size_t k = r.u32();
  const std::size_t t = r.u32();
  const std::size_t f = r.u32();
  const std::size_t n = k * t * f;
  if (r.remaining() != 3 * 4 * n) {
    throw Error(ErrorCode::kDimensionMismatch, "LMF1 payload holds " + std::to_string(r.remaining()) +
                                                   " bytes, header implies " + std::to_string(12 * n));
  }
  auto w = widen(r.f32s(n));
  auto mu = widen(r.f32s(n));
  auto beta = widen(r.f32s(n));
  // Weights were rounded to float; renormalise each cell so the simplex
  // check holds at double precision.
  for (std::size_t c = 0; c < t * f; ++c) {
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j) total += w[j * t * f + c];
    if (total > 0.0) {
      for (std::size_t j = 0; j < k; ++j) w[j * t * f + c] /= total;
    }
  }
  return LaplaceMixtureField(k, t, f, std::move(w), std::move(mu), std::move(beta), scale_floor);
}

void write_mixture(const LaplaceMixtureField& field, const std::filesystem::path& path) {
  write_file_bytes(path, encode_mixture(field));
}

LaplaceMixtureField read_mixture(const std::filesystem::path& path, double scale_floor) {
  return decode_mixture(read_file_bytes(path), scale_floor);
}

std::string mixture_csv(const LaplaceMixtureField& field) {
  std::string out = "t,f,k,pi,mu,beta\n";
  char buf[160];
  for (std::size_t t = 0; t < field.frames(); ++t) {
    for (std::size_t f = 0; f < field.bins(); ++f) {
      for (std::size_t k = 0; k < field.components(); ++k) {
        std::snprintf(buf, sizeof(buf), "%zu,%zu,%zu,%.9g,%.9g,%.9g\n", t, f, k, field.weight(t, f, k),
                      field.mean(t, f, k), field.scale(t, f, k));
        out += buf;
      }
    }
  }
  return out;
}

}  // namespace oversmooth::probloss

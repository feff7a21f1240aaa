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

#include "oversmooth/metrics/laplacian.hpp"

#include <cmath>
#include <string>

#include "oversmooth/core/error.hpp"

namespace oversmooth::metrics {

Grid laplacian_response(const Spectrogram& spec) {
  if (spec.frames() < 3 || spec.bins() < 3) {
    throw Error(ErrorCode::kGridTooSmall, "Laplacian needs at least 3x3, got " + std::to_string(spec.frames()) +
                                              "x" + std::to_string(spec.bins()));
  }
  Grid out(spec.frames() - 2, spec.bins() - 2);
  for (std::size_t t = 1; t + 1 < spec.frames(); ++t) {
    for (std::size_t f = 1; f + 1 < spec.bins(); ++f) {
      const double center = spec(t, f);
      const double cross = static_cast<double>(spec(t - 1, f)) + spec(t + 1, f) + spec(t, f - 1) + spec(t, f + 1);
      out(t - 1, f - 1) = (4.0 * center - cross) / 6.0;
    }
  }
  return out;
}

double var_laplacian(const Spectrogram& spec) {
  const Grid response = laplacian_response(spec);
  const auto n = static_cast<double>(response.size());
  double mean = 0.0;
  for (double v : response.values()) mean += std::abs(v);
  mean /= n;
  double acc = 0.0;
  for (double v : response.values()) {
    const double d = std::abs(v) - mean;
    acc += d * d;
  }
  return acc / n;
}

}  // namespace oversmooth::metrics

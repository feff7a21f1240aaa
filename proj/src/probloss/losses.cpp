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

#include "oversmooth/probloss/losses.hpp"

#include <cmath>
#include <string>

#include "oversmooth/core/error.hpp"

namespace oversmooth::probloss {

double elementwise_loss(ElementwiseKind kind, const Spectrogram& pred, const Spectrogram& target) {
  if (pred.frames() != target.frames() || pred.bins() != target.bins()) {
    throw Error(ErrorCode::kShapeMismatch, std::to_string(pred.frames()) + "x" + std::to_string(pred.bins()) +
                                               " vs " + std::to_string(target.frames()) + "x" +
                                               std::to_string(target.bins()));
  }
  if (pred.size() == 0) return 0.0;
  double acc = 0.0;
  const auto p = pred.values();
  const auto y = target.values();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = static_cast<double>(p[i]) - y[i];
    acc += kind == ElementwiseKind::kMae ? std::abs(d) : d * d;
  }
  return acc / static_cast<double>(p.size());
}

double ssim_loss(const Spectrogram& pred, const Spectrogram& target, const metrics::SsimConfig& cfg) {
  return 1.0 - metrics::ssim(pred, target, cfg);
}

}  // namespace oversmooth::probloss

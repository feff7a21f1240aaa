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

#include <array>

#include "oversmooth/core/grid.hpp"
#include "oversmooth/core/spectrogram.hpp"

namespace oversmooth::metrics {

/// (1/6) * [[0,-1,0],[-1,4,-1],[0,-1,0]]; the weights sum to zero.
inline constexpr std::array<std::array<double, 3>, 3> kLaplacianMask = {{
    {0.0, -1.0 / 6.0, 0.0},
    {-1.0 / 6.0, 4.0 / 6.0, -1.0 / 6.0},
    {0.0, -1.0 / 6.0, 0.0},
}};

/// Valid (unpadded) correlation with the Laplacian mask: (T-2) x (F-2).
Grid laplacian_response(const Spectrogram& spec);

/// Variance of |Laplacian response| over the response cells (divided by the
/// cell count, so values are comparable across utterance lengths).
double var_laplacian(const Spectrogram& spec);

}  // namespace oversmooth::metrics

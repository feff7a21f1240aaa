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

#include <cstddef>
#include <span>

namespace oversmooth::density {

/// Hartigan's dip: sup distance between the empirical CDF and the closest
/// unimodal CDF. Larger means stronger evidence of multimodality.
struct DipResult {
  double dip = 0.0;
  std::size_t n = 0;
};

/// Greatest-convex-minorant / least-concave-majorant iteration on the sorted
/// sample. Always within [1/(2n), 1/4]; requires n >= 2.
DipResult dip_statistic(std::span<const double> samples);

}  // namespace oversmooth::density

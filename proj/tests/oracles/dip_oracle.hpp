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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace oversmooth::oracles {

// Brute-force dip for tiny samples. Candidates are piecewise-linear CDFs with
// knots at the sorted sample points, a point mass allowed only at the mode
// knot, slopes nondecreasing before the mode and nonincreasing after it. Tails
// can be made arbitrarily flat, so they never violate unimodality. Every knot
// value is searched on a grid of the given resolution.
inline double grid_search_dip(std::vector<double> x, std::size_t resolution) {
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  const double step = 1.0 / static_cast<double>(resolution);
  double best = std::numeric_limits<double>::infinity();

  for (std::size_t mode = 0; mode < n; ++mode) {
    // Free values: left limit and value at the mode knot, one value elsewhere.
    std::vector<std::size_t> idx(n + 1, 0);
    auto assemble = [&](std::vector<double>& below, std::vector<double>& at) {
      std::size_t k = 0;
      for (std::size_t i = 0; i < n; ++i) {
        below[i] = static_cast<double>(idx[k]) * step;
        if (i == mode) ++k;
        at[i] = static_cast<double>(idx[k]) * step;
        ++k;
      }
    };
    std::vector<double> below(n), at(n);
    while (true) {
      assemble(below, at);
      bool ok = true;
      double prev_slope = 0.0;
      for (std::size_t i = 0; i + 1 < n && ok; ++i) {
        const double slope = (below[i + 1] - at[i]) / (x[i + 1] - x[i]);
        if (i > 0) {
          if (i + 1 <= mode && slope < prev_slope) ok = false;
          if (i >= mode + 1 && slope > prev_slope) ok = false;
        }
        prev_slope = slope;
      }
      if (ok) {
        double rho = std::max(below[0], 1.0 - at[n - 1]);
        for (std::size_t i = 0; i < n; ++i) {
          const double f_below = static_cast<double>(i) / static_cast<double>(n);
          const double f_at = static_cast<double>(i + 1) / static_cast<double>(n);
          rho = std::max({rho, std::abs(f_below - below[i]), std::abs(f_at - at[i])});
        }
        best = std::min(best, rho);
      }
      // Next nondecreasing index sequence.
      std::size_t pos = idx.size();
      while (pos > 0 && idx[pos - 1] == resolution) --pos;
      if (pos == 0) break;
      const std::size_t v = idx[pos - 1] + 1;
      for (std::size_t j = pos - 1; j < idx.size(); ++j) idx[j] = v;
    }
  }
  return best;
}

}  // namespace oversmooth::oracles

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

#include "oversmooth/density/dip.hpp"

#include <algorithm>
#include <vector>

#include "oversmooth/core/error.hpp"

namespace oversmooth::density {
namespace {

// Works in units of 2n * dip on a 1-based sorted copy, following the
// classical Fortran/C layout of the algorithm.
double dip_sorted(const std::vector<double>& x, long n) {
  double dip = 1.0;
  if (x[static_cast<std::size_t>(n)] == x[1]) return dip;

  std::vector<long> mn(static_cast<std::size_t>(n) + 1);
  std::vector<long> mj(static_cast<std::size_t>(n) + 1);
  std::vector<long> gcm(static_cast<std::size_t>(n) + 2);
  std::vector<long> lcm(static_cast<std::size_t>(n) + 2);
  auto X = [&](long i) { return x[static_cast<std::size_t>(i)]; };

  // Indices over which combination is needed for the convex minorant.
  mn[1] = 1;
  for (long j = 2; j <= n; ++j) {
    mn[j] = j - 1;
    for (;;) {
      const long mnj = mn[j];
      const long mnmnj = mn[mnj];
      if (mnj == 1 || (X(j) - X(mnj)) * static_cast<double>(mnj - mnmnj) <
                          (X(mnj) - X(mnmnj)) * static_cast<double>(j - mnj)) {
        break;
      }
      mn[j] = mnmnj;
    }
  }
  // ... and for the concave majorant.
  mj[n] = n;
  for (long k = n - 1; k >= 1; --k) {
    mj[k] = k + 1;
    for (;;) {
      const long mjk = mj[k];
      const long mjmjk = mj[mjk];
      if (mjk == n || (X(k) - X(mjk)) * static_cast<double>(mjk - mjmjk) <
                          (X(mjk) - X(mjmjk)) * static_cast<double>(k - mjk)) {
        break;
      }
      mj[k] = mjmjk;
    }
  }

  long low = 1;
  long high = n;
  for (;;) {
    // Change points of the GCM from high down to low.
    long ic = 1;
    gcm[1] = high;
    while (gcm[ic] > low) {
      const long prev = gcm[ic];
      ++ic;
      gcm[ic] = mn[prev];
    }
    const long l_gcm = ic;
    long ix = l_gcm - 1;
    long ig = l_gcm;

    // Change points of the LCM from low up to high.
    ic = 1;
    lcm[1] = low;
    while (lcm[ic] < high) {
      ++ic;
      lcm[ic] = mj[lcm[ic - 1]];
    }
    const long l_lcm = ic;
    long iv = 2;
    long ih = l_lcm - 1;

    // Largest distance between GCM and LCM on [low, high].
    double d = 0.0;
    if (l_gcm != 2 || l_lcm != 2) {
      do {
        const long gcmix = gcm[ix];
        const long lcmiv = lcm[iv];
        if (gcmix > lcmiv) {
          const long gcmi1 = gcm[ix + 1];
          const double dx = static_cast<double>(lcmiv - gcmi1 + 1) -
                            (X(lcmiv) - X(gcmi1)) * static_cast<double>(gcmix - gcmi1) / (X(gcmix) - X(gcmi1));
          ++iv;
          if (dx >= d) {
            d = dx;
            ig = ix + 1;
            ih = iv - 1;
          }
        } else {
          const long lcmiv1 = lcm[iv - 1];
          const double dx = (X(gcmix) - X(lcmiv1)) * static_cast<double>(lcmiv - lcmiv1) / (X(lcmiv) - X(lcmiv1)) -
                            static_cast<double>(gcmix - lcmiv1 - 1);
          --ix;
          if (dx >= d) {
            d = dx;
            ig = ix + 1;
            ih = iv;
          }
        }
        if (ix < 1) ix = 1;
        if (iv > l_lcm) iv = l_lcm;
      } while (gcm[ix] != lcm[iv]);
    } else {
      d = 1.0;
    }

    if (d < dip) break;

    // Dip of the convex minorant on the selected stretch.
    double dip_l = 0.0;
    for (long j = ig; j < l_gcm; ++j) {
      double max_t = 1.0;
      const long jb = gcm[j + 1];
      const long je = gcm[j];
      if (je - jb > 1 && X(je) != X(jb)) {
        const double slope = static_cast<double>(je - jb) / (X(je) - X(jb));
        for (long jj = jb; jj <= je; ++jj) {
          const double t = static_cast<double>(jj - jb + 1) - (X(jj) - X(jb)) * slope;
          max_t = std::max(max_t, t);
        }
      }
      dip_l = std::max(dip_l, max_t);
    }
    // ... and of the concave majorant.
    double dip_u = 0.0;
    for (long j = ih; j < l_lcm; ++j) {
      double max_t = 1.0;
      const long jb = lcm[j];
      const long je = lcm[j + 1];
      if (je - jb > 1 && X(je) != X(jb)) {
        const double slope = static_cast<double>(je - jb) / (X(je) - X(jb));
        for (long jj = jb; jj <= je; ++jj) {
          const double t = (X(jj) - X(jb)) * slope - static_cast<double>(jj - jb - 1);
          max_t = std::max(max_t, t);
        }
      }
      dip_u = std::max(dip_u, max_t);
    }
    dip = std::max(dip, std::max(dip_u, dip_l));

    if (low == gcm[ig] && high == lcm[ih]) break;
    low = gcm[ig];
    high = lcm[ih];
    // A modal interval collapsed to one point has nothing left to fit.
    if (low >= high) break;
  }
  return dip;
}

}  // namespace

DipResult dip_statistic(std::span<const double> samples) {
  if (samples.size() < 2) throw Error(ErrorCode::kTooFewSamples, "dip needs at least two samples");
  std::vector<double> x(samples.size() + 1);
  std::copy(samples.begin(), samples.end(), x.begin() + 1);
  std::sort(x.begin() + 1, x.end());
  const auto n = static_cast<long>(samples.size());
  const double twice_n_dip = dip_sorted(x, n);
  return {twice_n_dip / (2.0 * static_cast<double>(n)), samples.size()};
}

}  // namespace oversmooth::density

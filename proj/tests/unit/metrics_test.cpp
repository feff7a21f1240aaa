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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oversmooth/core/error.hpp"
#include "oversmooth/core/rng.hpp"
#include "oversmooth/metrics/laplacian.hpp"
#include "oversmooth/metrics/ssim.hpp"

namespace oversmooth::metrics {
namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an oversmooth::Error";
  return ErrorCode::kInvalidArgument;
}

Spectrogram constant(std::size_t t, std::size_t f, float v) { return Spectrogram(t, f, std::vector<float>(t * f, v)); }

Spectrogram random_grid(SeededRng& rng, std::size_t t, std::size_t f, double scale = 1.0) {
  std::vector<float> v(t * f);
  for (auto& x : v) x = static_cast<float>(scale * rng.normal());
  return Spectrogram(t, f, v);
}

// Literal double loop over the mask, with the mask scaled to integers so
// integer-valued grids give exact sums.
Grid brute_force_laplacian(const Spectrogram& s) {
  const int mask[3][3] = {{0, -1, 0}, {-1, 4, -1}, {0, -1, 0}};
  Grid out(s.frames() - 2, s.bins() - 2);
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) {
      double acc = 0.0;
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) acc += mask[a][b] * static_cast<double>(s(i + a, j + b));
      }
      out(i, j) = acc / 6.0;
    }
  }
  return out;
}

TEST(Laplacian, MaskSumsToZero) {
  double total = 0.0;
  for (const auto& row : kLaplacianMask) {
    for (double w : row) total += w;
  }
  EXPECT_NEAR(total, 0.0, 1e-15);
}

TEST(Laplacian, ConstantGridGivesZeros) {
  const auto out = laplacian_response(constant(6, 9, 3.25f));
  EXPECT_EQ(out.rows(), 4u);
  EXPECT_EQ(out.cols(), 7u);
  for (double v : out.values()) EXPECT_EQ(v, 0.0);
}

TEST(Laplacian, CenterImpulse) {
  const Spectrogram s(3, 3, {0, 0, 0, 0, 1, 0, 0, 0, 0});
  const auto out = laplacian_response(s);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_NEAR(out(0, 0), 4.0 / 6.0, 1e-15);
}

TEST(Laplacian, TwoImpulseRow) {
  Spectrogram s(3, 5);
  s.set(1, 1, 1.0f);
  s.set(1, 3, 1.0f);
  const auto out = laplacian_response(s);
  ASSERT_EQ(out.rows(), 1u);
  ASSERT_EQ(out.cols(), 3u);
  EXPECT_NEAR(out(0, 0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(out(0, 1), -1.0 / 3.0, 1e-15);
  EXPECT_NEAR(out(0, 2), 2.0 / 3.0, 1e-15);
}

TEST(Laplacian, MatchesBruteForceOnIntegerGridsExactly) {
  SeededRng rng(21, 0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<float> v(5 * 7);
    for (auto& x : v) x = static_cast<float>(static_cast<int>(rng.uniform_index(2001)) - 1000);
    const Spectrogram s(5, 7, v);
    const auto fast = laplacian_response(s);
    const auto slow = brute_force_laplacian(s);
    for (std::size_t i = 0; i < fast.size(); ++i) ASSERT_EQ(fast.values()[i], slow.values()[i]);
  }
}

TEST(Laplacian, MatchesBruteForceOnRealGrids) {
  SeededRng rng(22, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = random_grid(rng, 5, 7);
    const auto fast = laplacian_response(s);
    const auto slow = brute_force_laplacian(s);
    for (std::size_t i = 0; i < fast.size(); ++i) ASSERT_NEAR(fast.values()[i], slow.values()[i], 1e-14);
  }
}

TEST(Laplacian, RejectsSmallGrids) {
  EXPECT_EQ(code_of([] { laplacian_response(constant(2, 5, 0.0f)); }), ErrorCode::kGridTooSmall);
  EXPECT_EQ(code_of([] { var_laplacian(constant(5, 2, 0.0f)); }), ErrorCode::kGridTooSmall);
}

TEST(VarLaplacian, ConstantGridIsZero) {
  EXPECT_EQ(var_laplacian(constant(10, 80, -4.5f)), 0.0);
}

TEST(VarLaplacian, HandComputedExample) {
  Spectrogram s(3, 5);
  s.set(1, 1, 1.0f);
  s.set(1, 3, 1.0f);
  // |L| = {2/3, 1/3, 2/3}, mean 5/9, deviations {1/9, -2/9, 1/9}.
  EXPECT_NEAR(var_laplacian(s), 2.0 / 81.0, 1e-12);
}

TEST(VarLaplacian, TranslationInvariant) {
  SeededRng rng(23, 0);
  for (int trial = 0; trial < 50; ++trial) {
    // Dyadic values keep the shifted grid exactly representable.
    std::vector<float> v(9 * 11);
    for (auto& x : v) x = static_cast<float>(static_cast<int>(rng.uniform_index(512)) - 256) / 64.0f;
    const Spectrogram s(9, 11, v);
    auto shifted_values = v;
    const float c = static_cast<float>(static_cast<int>(rng.uniform_index(21)) - 10);
    for (auto& x : shifted_values) x += c;
    EXPECT_EQ(var_laplacian(Spectrogram(9, 11, shifted_values)), var_laplacian(s));
  }
}

TEST(VarLaplacian, BlurNeverIncreasesIt) {
  SeededRng rng(24, 0);
  const double kernel[3] = {0.25, 0.5, 0.25};
  int holds = 0;
  const int trials = 200;
  for (int trial = 0; trial < trials; ++trial) {
    const auto sharp = random_grid(rng, 20, 24);
    Spectrogram blurred(sharp.frames() - 2, sharp.bins() - 2);
    for (std::size_t t = 0; t < blurred.frames(); ++t) {
      for (std::size_t f = 0; f < blurred.bins(); ++f) {
        double acc = 0.0;
        for (int a = 0; a < 3; ++a) {
          for (int b = 0; b < 3; ++b) acc += kernel[a] * kernel[b] * sharp(t + a, f + b);
        }
        blurred.set(t, f, static_cast<float>(acc));
      }
    }
    holds += var_laplacian(blurred) <= var_laplacian(sharp) ? 1 : 0;
  }
  EXPECT_GE(holds, trials * 99 / 100);
}

TEST(Ssim, IdenticalGridsScoreExactlyOne) {
  SeededRng rng(31, 0);
  const auto a = random_grid(rng, 17, 23);
  const auto map = ssim_map(a, a);
  for (double v : map.values()) EXPECT_EQ(v, 1.0);
  EXPECT_EQ(ssim(a, a), 1.0);
  SsimConfig gaussian;
  gaussian.kind = SsimWindow::kGaussian;
  EXPECT_EQ(ssim(a, a, gaussian), 1.0);
}

TEST(Ssim, ConstantZeroVersusOne) {
  const double c1 = SsimConfig{}.c1;
  const auto map = ssim_map(constant(12, 14, 0.0f), constant(12, 14, 1.0f));
  for (double v : map.values()) EXPECT_NEAR(v, c1 / (1.0 + c1), 1e-12);
  EXPECT_NEAR(ssim(constant(12, 14, 0.0f), constant(12, 14, 1.0f)), 9.999e-5, 1e-8);
}

TEST(Ssim, IdenticalConstantsScoreOne) {
  EXPECT_EQ(ssim(constant(5, 5, 0.5f), constant(5, 5, 0.5f)), 1.0);
}

TEST(Ssim, SymmetricAndBounded) {
  SeededRng rng(32, 0);
  for (int trial = 0; trial < 40; ++trial) {
    const auto a = random_grid(rng, 13, 16);
    const auto b = random_grid(rng, 13, 16, 0.5 + rng.uniform());
    const auto ab = ssim_map(a, b);
    const auto ba = ssim_map(b, a);
    for (std::size_t i = 0; i < ab.size(); ++i) {
      EXPECT_EQ(ab.values()[i], ba.values()[i]);
      EXPECT_LE(std::abs(ab.values()[i]), 1.0 + 1e-12);
    }
    EXPECT_EQ(ssim(a, b), ssim(b, a));
  }
}

TEST(Ssim, NegativeCorrelationIsNotClamped) {
  SeededRng rng(33, 0);
  const auto a = random_grid(rng, 16, 16);
  std::vector<float> neg(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) neg[i] = -a.values()[i];
  EXPECT_LT(ssim(a, Spectrogram(16, 16, neg)), 0.0);
}

TEST(Ssim, SmallGridsReflectRepeatedly) {
  SeededRng rng(34, 0);
  const auto a = random_grid(rng, 2, 3);
  const auto b = random_grid(rng, 2, 3);
  const auto map = ssim_map(a, b);
  EXPECT_EQ(map.size(), 6u);
  for (double v : map.values()) EXPECT_TRUE(std::isfinite(v));
}

TEST(Ssim, Errors) {
  EXPECT_EQ(code_of([] { ssim(constant(3, 4, 0), constant(4, 3, 0)); }), ErrorCode::kShapeMismatch);
  SsimConfig cfg;
  cfg.range = DynamicRange{1.0, 1.0};
  EXPECT_EQ(code_of([&] { ssim(constant(3, 4, 0), constant(3, 4, 1), cfg); }), ErrorCode::kDegenerateRange);
  SsimConfig even;
  even.window = 10;
  EXPECT_EQ(code_of([&] { ssim(constant(3, 4, 0), constant(3, 4, 1), even); }), ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace oversmooth::metrics

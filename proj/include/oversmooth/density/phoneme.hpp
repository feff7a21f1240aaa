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
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "oversmooth/core/alignment.hpp"
#include "oversmooth/density/dip.hpp"
#include "oversmooth/density/kde.hpp"

namespace oversmooth::density {

/// Pairs (y(t, f1), y(t, f2)) within each span.
struct FreqPair {
  std::size_t f1 = 0;
  std::size_t f2 = 0;
};

/// Pairs (y(t, f), y(t + lag, f)); both frames lie in the same span.
struct TimeLag {
  std::size_t f = 0;
  std::size_t lag = 1;
};

using JointAxis = std::variant<FreqPair, TimeLag>;

/// All y(t, f) with t inside spans labelled `phoneme`, pooled in corpus order.
std::vector<double> phoneme_values(const AlignedCorpus& corpus, std::string_view phoneme, std::size_t bin);

std::vector<std::pair<double, double>> phoneme_pairs(const AlignedCorpus& corpus, std::string_view phoneme,
                                                     const JointAxis& axis);

Density1D phoneme_marginal(const AlignedCorpus& corpus, std::string_view phoneme, std::size_t bin,
                           std::optional<double> bandwidth = std::nullopt);

Density2D phoneme_joint(const AlignedCorpus& corpus, std::string_view phoneme, const JointAxis& axis,
                        std::optional<std::pair<double, double>> bandwidths = std::nullopt);

struct DipCell {
  std::string phoneme;
  std::size_t bin = 0;
  std::size_t samples = 0;
  double dip = 0.0;
};

struct MeanDip {
  double value = 0.0;
  /// Cells that contributed, in lexicographic (phoneme, bin) order.
  std::vector<DipCell> cells;
  /// Cells with fewer than two samples.
  std::vector<DipCell> skipped;
};

/// Average dip over every (phoneme, bin) cell with at least two samples.
MeanDip mean_dip(const AlignedCorpus& corpus, const std::vector<std::size_t>& bins,
                 const std::vector<std::string>& phonemes);

}  // namespace oversmooth::density

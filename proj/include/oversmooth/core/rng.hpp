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
#include <cstdint>
#include <limits>

namespace oversmooth {

/// Deterministic xoshiro256** generator keyed by (seed, stream).
///
/// The 256-bit state is filled by SplitMix64 over a mix of seed and stream,
/// so equal keys give equal sequences on every platform. All floating-point
/// draws are built from integer output with fixed arithmetic (no std::
/// distributions, whose algorithms are implementation-defined).
class SeededRng {
 public:
  using result_type = std::uint64_t;

  SeededRng(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next(); }
  std::uint64_t next();

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform in the open interval (0, 1).
  double uniform_open();
  /// Standard normal via Box-Muller (one output per call, no caching).
  double normal();
  /// Uniform integer in [0, n); n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);

  /// Independent generator for a labelled sub-task.
  SeededRng substream(std::uint64_t id) const;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::array<std::uint64_t, 4> state_{};
};

/// SplitMix64 finalizer; exposed for deriving stream labels.
std::uint64_t mix64(std::uint64_t x);

}  // namespace oversmooth

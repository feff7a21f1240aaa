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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "oversmooth/core/spectrogram.hpp"

namespace oversmooth {

/// One phoneme occupying frames [start, end).
struct AlignmentEntry {
  std::string label;
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const noexcept { return end - start; }
  friend bool operator==(const AlignmentEntry&, const AlignmentEntry&) = default;
};

/// Phoneme-to-frame table: entries sorted by start, non-overlapping, non-empty.
class Alignment {
 public:
  Alignment() = default;
  /// Validates ordering and span invariants.
  explicit Alignment(std::vector<AlignmentEntry> entries);

  const std::vector<AlignmentEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool contains(std::string_view label) const;
  /// Largest end index, 0 for an empty alignment.
  std::size_t end_frame() const noexcept;

 private:
  std::vector<AlignmentEntry> entries_;
};

/// Parses `label<TAB>start<TAB>end` lines. Blank lines and a trailing CR are ignored.
Alignment parse_alignment(std::string_view text);
Alignment read_alignment(const std::filesystem::path& path);

/// Concatenates, in span order, every frame labelled `phoneme`.
/// Throws kSpanOutOfRange if any entry of the alignment ends past spec.frames().
Spectrogram gather_phoneme_frames(const Spectrogram& spec, const Alignment& align,
                                  std::string_view phoneme);

/// A mel-spectrogram paired with its alignment; the unit of every corpus analysis.
struct AlignedUtterance {
  Spectrogram mel;
  Alignment alignment;
};

using AlignedCorpus = std::vector<AlignedUtterance>;

}  // namespace oversmooth

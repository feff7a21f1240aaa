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

#include "oversmooth/core/alignment.hpp"

#include <algorithm>
#include <charconv>

#include "oversmooth/core/binary_io.hpp"
#include "oversmooth/core/error.hpp"

namespace oversmooth {
namespace {

std::size_t parse_frame(std::string_view field, std::size_t line_no) {
  std::size_t value = 0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc() || ptr != last) {
    throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": frame field \"" +
                                       std::string(field) + "\" is not a non-negative integer");
  }
  return value;
}

}  // namespace

Alignment::Alignment(std::vector<AlignmentEntry> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.start >= e.end) {
      throw Error(ErrorCode::kEmptySpan, "entry " + std::to_string(i) + " (" + e.label + ") spans [" +
                                             std::to_string(e.start) + ", " + std::to_string(e.end) + ")");
    }
    if (i == 0) continue;
    const auto& prev = entries_[i - 1];
    if (e.start < prev.start) {
      throw Error(ErrorCode::kUnsorted, "entry " + std::to_string(i) + " starts before its predecessor");
    }
    if (e.start < prev.end) {
      throw Error(ErrorCode::kOverlap, "entry " + std::to_string(i) + " (" + e.label +
                                           ") overlaps entry " + std::to_string(i - 1) + " (" +
                                           prev.label + ")");
    }
  }
}

bool Alignment::contains(std::string_view label) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.label == label; });
}

std::size_t Alignment::end_frame() const noexcept {
  return entries_.empty() ? 0 : entries_.back().end;
}

Alignment parse_alignment(std::string_view text) {
  std::vector<AlignmentEntry> entries;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string_view::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab2 == std::string_view::npos || line.find('\t', tab2 + 1) != std::string_view::npos) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": expected 3 tab-separated fields");
    }
    AlignmentEntry e;
    e.label = std::string(line.substr(0, tab1));
    e.start = parse_frame(line.substr(tab1 + 1, tab2 - tab1 - 1), line_no);
    e.end = parse_frame(line.substr(tab2 + 1), line_no);
    entries.push_back(std::move(e));
  }
  return Alignment(std::move(entries));
}

Alignment read_alignment(const std::filesystem::path& path) { return parse_alignment(read_file_text(path)); }

Spectrogram gather_phoneme_frames(const Spectrogram& spec, const Alignment& align,
                                  std::string_view phoneme) {
  if (align.end_frame() > spec.frames()) {
    throw Error(ErrorCode::kSpanOutOfRange, "alignment ends at frame " + std::to_string(align.end_frame()) +
                                                " but spectrogram has " + std::to_string(spec.frames()));
  }
  Spectrogram out(0, spec.bins());
  for (const auto& e : align.entries()) {
    if (e.label != phoneme) continue;
    for (std::size_t t = e.start; t < e.end; ++t) out.append_frame(spec.frame(t));
  }
  return out;
}

}  // namespace oversmooth

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

#include "oversmooth/density/phoneme.hpp"

#include <algorithm>
#include <string>

#include "oversmooth/core/error.hpp"

namespace oversmooth::density {
namespace {

void check_corpus(const AlignedCorpus& corpus, std::string_view phoneme) {
  bool present = false;
  for (const auto& utt : corpus) {
    if (utt.alignment.end_frame() > utt.mel.frames()) {
      throw Error(ErrorCode::kSpanOutOfRange, "alignment ends at frame " + std::to_string(utt.alignment.end_frame()) +
                                                  " past " + std::to_string(utt.mel.frames()) + " frames");
    }
    present = present || utt.alignment.contains(phoneme);
  }
  if (!present) throw Error(ErrorCode::kPhonemeAbsent, "phoneme \"" + std::string(phoneme) + "\" not in corpus");
}

void check_bin(const AlignedCorpus& corpus, std::size_t bin) {
  for (const auto& utt : corpus) {
    if (bin >= utt.mel.bins()) {
      throw Error(ErrorCode::kBinOutOfRange,
                  "bin " + std::to_string(bin) + " but spectrogram has " + std::to_string(utt.mel.bins()) + " bins");
    }
  }
}

}  // namespace

std::vector<double> phoneme_values(const AlignedCorpus& corpus, std::string_view phoneme, std::size_t bin) {
  check_bin(corpus, bin);
  check_corpus(corpus, phoneme);
  std::vector<double> out;
  for (const auto& utt : corpus) {
    for (const auto& e : utt.alignment.entries()) {
      if (e.label != phoneme) continue;
      for (std::size_t t = e.start; t < e.end; ++t) out.push_back(utt.mel(t, bin));
    }
  }
  return out;
}

std::vector<std::pair<double, double>> phoneme_pairs(const AlignedCorpus& corpus, std::string_view phoneme,
                                                     const JointAxis& axis) {
  std::vector<std::pair<double, double>> out;
  if (const auto* fp = std::get_if<FreqPair>(&axis)) {
    check_bin(corpus, std::max(fp->f1, fp->f2));
    check_corpus(corpus, phoneme);
    for (const auto& utt : corpus) {
      for (const auto& e : utt.alignment.entries()) {
        if (e.label != phoneme) continue;
        for (std::size_t t = e.start; t < e.end; ++t) out.emplace_back(utt.mel(t, fp->f1), utt.mel(t, fp->f2));
      }
    }
  } else {
    const auto& tl = std::get<TimeLag>(axis);
    if (tl.lag == 0) throw Error(ErrorCode::kInvalidArgument, "time lag must be positive");
    check_bin(corpus, tl.f);
    check_corpus(corpus, phoneme);
    for (const auto& utt : corpus) {
      for (const auto& e : utt.alignment.entries()) {
        if (e.label != phoneme) continue;
        for (std::size_t t = e.start; t + tl.lag < e.end; ++t) {
          out.emplace_back(utt.mel(t, tl.f), utt.mel(t + tl.lag, tl.f));
        }
      }
    }
  }
  if (out.empty()) throw Error(ErrorCode::kNoPairs, "no frame pairs inside spans of \"" + std::string(phoneme) + "\"");
  return out;
}

Density1D phoneme_marginal(const AlignedCorpus& corpus, std::string_view phoneme, std::size_t bin,
                           std::optional<double> bandwidth) {
  const auto values = phoneme_values(corpus, phoneme, bin);
  return kde1d(values, bandwidth);
}

Density2D phoneme_joint(const AlignedCorpus& corpus, std::string_view phoneme, const JointAxis& axis,
                        std::optional<std::pair<double, double>> bandwidths) {
  const auto pairs = phoneme_pairs(corpus, phoneme, axis);
  return kde2d(pairs, bandwidths);
}

MeanDip mean_dip(const AlignedCorpus& corpus, const std::vector<std::size_t>& bins,
                 const std::vector<std::string>& phonemes) {
  std::vector<std::pair<std::string, std::size_t>> keys;
  for (const auto& ph : phonemes) {
    for (auto f : bins) keys.emplace_back(ph, f);
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  MeanDip out;
  double total = 0.0;
  for (const auto& [ph, f] : keys) {
    check_bin(corpus, f);
    std::vector<double> values;
    const bool present = std::any_of(corpus.begin(), corpus.end(),
                                     [&](const auto& utt) { return utt.alignment.contains(ph); });
    if (present) values = phoneme_values(corpus, ph, f);
    DipCell cell{ph, f, values.size(), 0.0};
    if (values.size() < 2) {
      out.skipped.push_back(cell);
      continue;
    }
    cell.dip = dip_statistic(values).dip;
    total += cell.dip;
    out.cells.push_back(cell);
  }
  if (out.cells.empty()) throw Error(ErrorCode::kAllCellsEmpty, "no (phoneme, bin) cell has two samples");
  out.value = total / static_cast<double>(out.cells.size());
  return out;
}

}  // namespace oversmooth::density

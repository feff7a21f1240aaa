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

#include "oversmooth/gan/gan.hpp"

#include <cmath>
#include <string>

#include "oversmooth/core/binary_io.hpp"
#include "oversmooth/core/error.hpp"

namespace oversmooth::gan {
namespace {

constexpr std::size_t kStages = 3;
constexpr std::size_t kTaps = 9;

double mean_square_offset(const std::vector<double>& scores, double target, const char* what) {
  if (scores.empty()) throw Error(ErrorCode::kEmptyScores, std::string(what) + " score set is empty");
  double acc = 0.0;
  for (double s : scores) acc += (s - target) * (s - target);
  return acc / static_cast<double>(scores.size());
}

// Activation volume: channels x rows x cols.
struct Volume {
  std::size_t c = 0, h = 0, w = 0;
  std::vector<double> v;

  Volume() = default;
  Volume(std::size_t c_, std::size_t h_, std::size_t w_) : c(c_), h(h_), w(w_), v(c_ * h_ * w_, 0.0) {}
  double& at(std::size_t ch, std::size_t i, std::size_t j) { return v[(ch * h + i) * w + j]; }
  double at(std::size_t ch, std::size_t i, std::size_t j) const { return v[(ch * h + i) * w + j]; }
};

std::size_t out_side(std::size_t n) { return (n + 1) / 2; }

Volume conv(const TinyDiscriminator& d, std::size_t s, const Volume& in) {
  const std::size_t co = TinyDiscriminator::kChannels[s + 1];
  Volume out(co, out_side(in.h), out_side(in.w));
  const auto p = d.parameters();
  const std::size_t wo = TinyDiscriminator::weight_offset(s), bo = TinyDiscriminator::bias_offset(s);
  for (std::size_t o = 0; o < co; ++o) {
    for (std::size_t i = 0; i < out.h; ++i) {
      for (std::size_t j = 0; j < out.w; ++j) {
        double acc = p[bo + o];
        for (std::size_t c = 0; c < in.c; ++c) {
          for (std::size_t ki = 0; ki < 3; ++ki) {
            const std::ptrdiff_t r = static_cast<std::ptrdiff_t>(2 * i + ki) - 1;
            if (r < 0 || r >= static_cast<std::ptrdiff_t>(in.h)) continue;
            for (std::size_t kj = 0; kj < 3; ++kj) {
              const std::ptrdiff_t q = static_cast<std::ptrdiff_t>(2 * j + kj) - 1;
              if (q < 0 || q >= static_cast<std::ptrdiff_t>(in.w)) continue;
              acc += p[wo + ((o * in.c + c) * 3 + ki) * 3 + kj] * in.at(c, static_cast<std::size_t>(r), static_cast<std::size_t>(q));
            }
          }
        }
        out.at(o, i, j) = acc;
      }
    }
  }
  return out;
}

Volume input_volume(const Grid& clip) {
  if (clip.rows() < kMinClipSide || clip.cols() < kMinClipSide) {
    throw Error(ErrorCode::kClipTooSmall, "clip " + std::to_string(clip.rows()) + "x" + std::to_string(clip.cols()) +
                                              " is below the " + std::to_string(kMinClipSide) + "x" +
                                              std::to_string(kMinClipSide) + " footprint");
  }
  Volume v(1, clip.rows(), clip.cols());
  for (std::size_t i = 0; i < clip.size(); ++i) {
    if (!std::isfinite(clip.values()[i])) throw Error(ErrorCode::kNonFinite, "clip value is not finite");
    v.v[i] = clip.values()[i];
  }
  return v;
}

}  // namespace

std::array<Spectrogram, kDiscriminatorCount> random_windows(const Spectrogram& spec, const WindowSpec& ws,
                                                            SeededRng& rng) {
  if (spec.frames() == 0) throw Error(ErrorCode::kInvalidArgument, "cannot crop an empty spectrogram");
  std::array<Spectrogram, kDiscriminatorCount> out;
  for (std::size_t i = 0; i < kDiscriminatorCount; ++i) {
    if (ws.lengths[i] == 0) throw Error(ErrorCode::kInvalidArgument, "window lengths must be positive");
    const std::size_t len = std::min(ws.lengths[i], spec.frames());
    const std::size_t start = rng.uniform_index(spec.frames() - len + 1);
    Spectrogram clip(0, spec.bins());
    for (std::size_t t = start; t < start + len; ++t) clip.append_frame(spec.frame(t));
    out[i] = std::move(clip);
  }
  return out;
}

double lsgan_d_loss(const ScoreSets& real, const ScoreSets& fake) {
  double total = 0.0;
  for (std::size_t i = 0; i < kDiscriminatorCount; ++i) {
    total += mean_square_offset(real[i], 1.0, "real") + mean_square_offset(fake[i], 0.0, "fake");
  }
  return total;
}

double lsgan_g_loss(const ScoreSets& fake) {
  double total = 0.0;
  for (std::size_t i = 0; i < kDiscriminatorCount; ++i) total += mean_square_offset(fake[i], 1.0, "fake");
  return total / static_cast<double>(kDiscriminatorCount);
}

TinyDiscriminator::TinyDiscriminator() : params_(parameter_count(), 0.0) {}

std::size_t TinyDiscriminator::weight_offset(std::size_t s) {
  std::size_t off = 0;
  for (std::size_t k = 0; k < s; ++k) off += kChannels[k + 1] * kChannels[k] * kTaps + kChannels[k + 1];
  return off;
}

std::size_t TinyDiscriminator::bias_offset(std::size_t s) {
  return weight_offset(s) + kChannels[s + 1] * kChannels[s] * kTaps;
}

std::size_t TinyDiscriminator::head_offset() { return weight_offset(kStages); }

std::size_t TinyDiscriminator::parameter_count() { return head_offset() + kChannels[kStages] + 1; }

void TinyDiscriminator::set_parameters(std::span<const double> flat) {
  if (flat.size() != parameter_count()) {
    throw Error(ErrorCode::kDimensionMismatch, "discriminator expects " + std::to_string(parameter_count()) +
                                                   " parameters, got " + std::to_string(flat.size()));
  }
  for (double v : flat) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFinite, "discriminator parameter is not finite");
  }
  params_.assign(flat.begin(), flat.end());
}

double& TinyDiscriminator::weight(std::size_t s, std::size_t o, std::size_t c, std::size_t ki, std::size_t kj) {
  return params_[weight_offset(s) + ((o * kChannels[s] + c) * 3 + ki) * 3 + kj];
}

double& TinyDiscriminator::bias(std::size_t s, std::size_t o) { return params_[bias_offset(s) + o]; }

double& TinyDiscriminator::head_weight(std::size_t c) { return params_[head_offset() + c]; }

double& TinyDiscriminator::head_bias() { return params_[head_offset() + kChannels[kStages]]; }

TinyDiscriminator make_discriminator(SeededRng& rng) {
  TinyDiscriminator d;
  std::vector<double> p(TinyDiscriminator::parameter_count(), 0.0);
  for (std::size_t s = 0; s < kStages; ++s) {
    const std::size_t fan_in = TinyDiscriminator::kChannels[s] * kTaps;
    const double sd = std::sqrt(2.0 / static_cast<double>(fan_in));
    const std::size_t n = TinyDiscriminator::kChannels[s + 1] * fan_in;
    for (std::size_t i = 0; i < n; ++i) p[TinyDiscriminator::weight_offset(s) + i] = sd * rng.normal();
  }
  const double head_sd = 1.0 / std::sqrt(static_cast<double>(TinyDiscriminator::kChannels[kStages]));
  for (std::size_t c = 0; c < TinyDiscriminator::kChannels[kStages]; ++c) {
    p[TinyDiscriminator::head_offset() + c] = head_sd * rng.normal();
  }
  d.set_parameters(p);
  return d;
}

ScoreGradient discriminator_score_grad(const TinyDiscriminator& d, const Grid& clip, SeededRng* dropout_rng) {
  std::array<Volume, kStages + 1> act;
  std::array<Volume, kStages> pre;
  std::array<std::vector<double>, kStages> mask;
  act[0] = input_volume(clip);
  for (std::size_t s = 0; s < kStages; ++s) {
    pre[s] = conv(d, s, act[s]);
    act[s + 1] = pre[s];
    auto& a = act[s + 1].v;
    mask[s].assign(a.size(), 1.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] < 0.0) a[i] *= kLeakySlope;
      if (dropout_rng != nullptr) {
        mask[s][i] = dropout_rng->uniform() < kDropout ? 0.0 : 1.0 / (1.0 - kDropout);
        a[i] *= mask[s][i];
      }
    }
  }
  const auto p = d.parameters();
  const Volume& last = act[kStages];
  const std::size_t cells = last.h * last.w;
  const std::size_t head = TinyDiscriminator::head_offset();
  const std::size_t cl = TinyDiscriminator::kChannels[kStages];

  ScoreGradient g;
  g.params.assign(p.size(), 0.0);
  g.score = p[head + cl];
  std::vector<double> pooled(cl, 0.0);
  for (std::size_t c = 0; c < cl; ++c) {
    for (std::size_t i = 0; i < cells; ++i) pooled[c] += last.v[c * cells + i];
    pooled[c] /= static_cast<double>(cells);
    g.score += p[head + c] * pooled[c];
    g.params[head + c] = pooled[c];
  }
  g.params[head + cl] = 1.0;

  Volume grad(last.c, last.h, last.w);
  for (std::size_t c = 0; c < cl; ++c) {
    for (std::size_t i = 0; i < cells; ++i) grad.v[c * cells + i] = p[head + c] / static_cast<double>(cells);
  }
  for (std::size_t s = kStages; s-- > 0;) {
    // Through dropout and the activation.
    for (std::size_t i = 0; i < grad.v.size(); ++i) {
      grad.v[i] *= mask[s][i] * (pre[s].v[i] < 0.0 ? kLeakySlope : 1.0);
    }
    const Volume& in = act[s];
    Volume down(in.c, in.h, in.w);
    const std::size_t wo = TinyDiscriminator::weight_offset(s), bo = TinyDiscriminator::bias_offset(s);
    for (std::size_t o = 0; o < grad.c; ++o) {
      for (std::size_t i = 0; i < grad.h; ++i) {
        for (std::size_t j = 0; j < grad.w; ++j) {
          const double go = grad.at(o, i, j);
          g.params[bo + o] += go;
          for (std::size_t c = 0; c < in.c; ++c) {
            for (std::size_t ki = 0; ki < 3; ++ki) {
              const std::ptrdiff_t r = static_cast<std::ptrdiff_t>(2 * i + ki) - 1;
              if (r < 0 || r >= static_cast<std::ptrdiff_t>(in.h)) continue;
              for (std::size_t kj = 0; kj < 3; ++kj) {
                const std::ptrdiff_t q = static_cast<std::ptrdiff_t>(2 * j + kj) - 1;
                if (q < 0 || q >= static_cast<std::ptrdiff_t>(in.w)) continue;
                const std::size_t widx = wo + ((o * in.c + c) * 3 + ki) * 3 + kj;
                const auto ru = static_cast<std::size_t>(r), qu = static_cast<std::size_t>(q);
                g.params[widx] += go * in.at(c, ru, qu);
                down.at(c, ru, qu) += go * p[widx];
              }
            }
          }
        }
      }
    }
    grad = std::move(down);
  }
  g.clip = Grid(clip.rows(), clip.cols(), std::move(grad.v));
  return g;
}

double discriminator_score(const TinyDiscriminator& d, const Grid& clip) {
  Volume a = input_volume(clip);
  for (std::size_t s = 0; s < kStages; ++s) {
    a = conv(d, s, a);
    for (double& v : a.v) {
      if (v < 0.0) v *= kLeakySlope;
    }
  }
  const auto p = d.parameters();
  const std::size_t head = TinyDiscriminator::head_offset();
  const std::size_t cells = a.h * a.w;
  double score = p[head + a.c];
  for (std::size_t c = 0; c < a.c; ++c) {
    double m = 0.0;
    for (std::size_t i = 0; i < cells; ++i) m += a.v[c * cells + i];
    score += p[head + c] * (m / static_cast<double>(cells));
  }
  return score;
}

double discriminator_score(const TinyDiscriminator& d, const Spectrogram& clip) {
  return discriminator_score(d, to_grid(clip));
}

namespace {
constexpr std::string_view kMagic = "DSC1";
}  // namespace

std::vector<std::uint8_t> encode_discriminator(const TinyDiscriminator& d) {
  ByteWriter w;
  w.magic(kMagic);
  w.u32(static_cast<std::uint32_t>(kStages));
  for (std::size_t s = 1; s <= kStages; ++s) w.u32(static_cast<std::uint32_t>(TinyDiscriminator::kChannels[s]));
  const std::vector<float> narrow(d.parameters().begin(), d.parameters().end());
  w.f32s(narrow);
  return w.bytes();
}

TinyDiscriminator decode_discriminator(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.expect_magic(kMagic);
  if (r.u32() != kStages) throw Error(ErrorCode::kUnsupportedFormat, "DSC1 stage count must be 3");
  for (std::size_t s = 1; s <= kStages; ++s) {
    if (r.u32() != TinyDiscriminator::kChannels[s]) {
      throw Error(ErrorCode::kUnsupportedFormat, "DSC1 channel widths differ from 8, 16, 16");
    }
  }
  const std::size_t n = TinyDiscriminator::parameter_count();
  if (r.remaining() != 4 * n) {
    throw Error(ErrorCode::kDimensionMismatch, "DSC1 payload holds " + std::to_string(r.remaining()) +
                                                   " bytes, expected " + std::to_string(4 * n));
  }
  const auto narrow = r.f32s(n);
  TinyDiscriminator d;
  d.set_parameters(std::vector<double>(narrow.begin(), narrow.end()));
  return d;
}

void write_discriminator(const TinyDiscriminator& d, const std::filesystem::path& path) {
  write_file_bytes(path, encode_discriminator(d));
}

TinyDiscriminator read_discriminator(const std::filesystem::path& path) {
  return decode_discriminator(read_file_bytes(path));
}

}  // namespace oversmooth::gan

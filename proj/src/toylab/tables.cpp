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

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "oversmooth/core/error.hpp"
#include "oversmooth/toylab/toylab.hpp"

namespace oversmooth::toylab {
namespace {

std::vector<std::vector<const Grid*>> group_by_condition(const ToyCorpus& corpus) {
  std::vector<std::vector<const Grid*>> groups(corpus.spec.conditions.size());
  for (const auto& s : corpus.samples) {
    if (s.condition >= groups.size()) throw Error(ErrorCode::kInvalidArgument, "sample condition out of range");
    groups[s.condition].push_back(&s.value);
  }
  for (std::size_t c = 0; c < groups.size(); ++c) {
    if (groups[c].empty()) throw Error(ErrorCode::kEmptyCondition, "condition " + std::to_string(c) + " has no samples");
  }
  return groups;
}

struct MeanVar {
  Grid mean;
  Grid variance;
};

MeanVar mean_and_variance(const std::vector<const Grid*>& group) {
  const std::size_t h = group[0]->rows(), w = group[0]->cols();
  MeanVar out{Grid(h, w), Grid(h, w)};
  const double n = static_cast<double>(group.size());
  for (const Grid* g : group) {
    for (std::size_t i = 0; i < g->size(); ++i) out.mean.values()[i] += g->values()[i];
  }
  for (double& v : out.mean.values()) v /= n;
  for (const Grid* g : group) {
    for (std::size_t i = 0; i < g->size(); ++i) {
      const double d = g->values()[i] - out.mean.values()[i];
      out.variance.values()[i] += d * d;
    }
  }
  for (double& v : out.variance.values()) v /= n;
  return out;
}

void add_row(RowFit& fit, std::span<const double> row) {
  if (fit.count == 0) {
    fit.mean.assign(row.size(), 0.0);
    fit.variance.assign(row.size(), 0.0);
  }
  ++fit.count;
  // Welford update; variance holds the running sum of squares until finish().
  const double n = static_cast<double>(fit.count);
  for (std::size_t j = 0; j < row.size(); ++j) {
    const double d = row[j] - fit.mean[j];
    fit.mean[j] += d / n;
    fit.variance[j] += d * (row[j] - fit.mean[j]);
  }
}

void finish(RowFit& fit) {
  if (fit.count == 0) return;
  for (double& v : fit.variance) v /= static_cast<double>(fit.count);
}

double rms_distance(const Grid& a, const Grid& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "sample and prototype shapes differ");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.values()[i] - b.values()[i];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(a.size()));
}

}  // namespace

PointwiseModel fit_pointwise(const ToyCorpus& corpus, PointLoss loss) {
  const auto groups = group_by_condition(corpus);
  PointwiseModel model;
  model.loss = loss;
  for (const auto& group : groups) {
    if (loss == PointLoss::kMse) {
      auto mv = mean_and_variance(group);
      model.prediction.push_back(std::move(mv.mean));
      model.spread.push_back(std::move(mv.variance));
      continue;
    }
    const std::size_t h = group[0]->rows(), w = group[0]->cols(), n = group.size();
    Grid median(h, w), mad(h, w);
    std::vector<double> column(n);
    for (std::size_t i = 0; i < h * w; ++i) {
      for (std::size_t k = 0; k < n; ++k) column[k] = group[k]->values()[i];
      std::sort(column.begin(), column.end());
      const double m = n % 2 == 1 ? column[n / 2] : 0.5 * (column[n / 2 - 1] + column[n / 2]);
      double dev = 0.0;
      for (double v : column) dev += std::abs(v - m);
      median.values()[i] = m;
      mad.values()[i] = dev / static_cast<double>(n);
    }
    model.prediction.push_back(std::move(median));
    model.spread.push_back(std::move(mad));
  }
  return model;
}

ConditionedModel fit_conditioned(const ToyCorpus& corpus) {
  const auto& spec = corpus.spec;
  ConditionedModel model;
  std::vector<std::vector<std::vector<const Grid*>>> cells(spec.conditions.size());
  for (std::size_t c = 0; c < cells.size(); ++c) cells[c].resize(spec.conditions[c].prototypes.size());
  for (const auto& s : corpus.samples) {
    if (s.condition >= cells.size() || s.mode >= cells[s.condition].size()) {
      throw Error(ErrorCode::kInvalidArgument, "sample condition or mode out of range");
    }
    cells[s.condition][s.mode].push_back(&s.value);
  }
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::size_t total = 0;
    for (const auto& cell : cells[c]) total += cell.size();
    model.mean.emplace_back();
    model.variance.emplace_back();
    model.frequency.emplace_back();
    for (std::size_t v = 0; v < cells[c].size(); ++v) {
      if (cells[c][v].empty()) {
        throw Error(ErrorCode::kEmptyCondition,
                    "condition " + std::to_string(c) + " mode " + std::to_string(v) + " has no samples");
      }
      auto mv = mean_and_variance(cells[c][v]);
      model.mean[c].push_back(std::move(mv.mean));
      model.variance[c].push_back(std::move(mv.variance));
      model.frequency[c].push_back(static_cast<double>(cells[c][v].size()) / static_cast<double>(total));
    }
  }
  return model;
}

std::size_t draw_mode(std::span<const double> frequency, SeededRng& rng) {
  if (frequency.empty()) throw Error(ErrorCode::kInvalidArgument, "empty frequency table");
  const double u = rng.uniform();
  double cum = 0.0;
  std::size_t last = 0;
  for (std::size_t k = 0; k < frequency.size(); ++k) {
    if (frequency[k] <= 0.0) continue;
    last = k;
    cum += frequency[k];
    if (u < cum) return k;
  }
  return last;
}

unsigned row_context(std::span<const double> row) {
  const std::size_t half = row.size() / 2;
  auto negative_mean = [](std::span<const double> part) {
    if (part.empty()) return false;
    double s = 0.0;
    for (double v : part) s += v;
    return s < 0.0;
  };
  return (negative_mean(row.first(half)) ? 2u : 0u) | (negative_mean(row.subspan(half)) ? 1u : 0u);
}

const RowFit& ArModel::row_fit(std::size_t condition, std::size_t row, unsigned ctx) const {
  const RowFit& fit = step.at(condition).at(row - 1)[ctx & 3u];
  return fit.count > 0 ? fit : pooled[condition][row - 1];
}

ArModel fit_ar(const ToyCorpus& corpus) {
  const auto& spec = corpus.spec;
  const std::size_t h = spec.rows(), w = spec.cols();
  if (h < 2 || w < 2) throw Error(ErrorCode::kInvalidArgument, "row-autoregressive fit needs grids of at least 2x2");
  for (std::size_t c = 0; c < spec.conditions.size(); ++c) {
    const auto& cond = spec.conditions[c];
    for (std::size_t i = 0; i < cond.prototypes.size(); ++i) {
      for (std::size_t j = i + 1; j < cond.prototypes.size(); ++j) {
        if (cond.weights[i] == 0.0 || cond.weights[j] == 0.0) continue;
        if (cond.prototypes[i] == cond.prototypes[j]) continue;
        if (row_context(cond.prototypes[i].row(0)) == row_context(cond.prototypes[j].row(0))) {
          throw Error(ErrorCode::kIndistinguishablePrototypes,
                      "condition " + std::to_string(c) + ": modes " + std::to_string(i) + " and " +
                          std::to_string(j) + " share a first-row context");
        }
      }
    }
  }
  const auto groups = group_by_condition(corpus);
  ArModel model;
  model.rows = h;
  model.cols = w;
  model.row0.resize(groups.size());
  model.step.assign(groups.size(), std::vector<std::array<RowFit, 4>>(h - 1));
  model.pooled.assign(groups.size(), std::vector<RowFit>(h - 1));
  for (std::size_t c = 0; c < groups.size(); ++c) {
    for (const Grid* g : groups[c]) {
      add_row(model.row0[c][row_context(g->row(0))], g->row(0));
      for (std::size_t r = 1; r < h; ++r) {
        add_row(model.step[c][r - 1][row_context(g->row(r - 1))], g->row(r));
        add_row(model.pooled[c][r - 1], g->row(r));
      }
    }
    for (auto& fit : model.row0[c]) finish(fit);
    for (std::size_t r = 0; r + 1 < h; ++r) {
      for (auto& fit : model.step[c][r]) finish(fit);
      finish(model.pooled[c][r]);
    }
  }
  return model;
}

Grid ar_generate(const ArModel& model, std::size_t condition, SeededRng& rng) {
  const auto& comps = model.row0.at(condition);
  std::array<double, 4> freq{};
  for (std::size_t k = 0; k < 4; ++k) freq[k] = static_cast<double>(comps[k].count);
  double total = 0.0;
  for (double f : freq) total += f;
  for (double& f : freq) f /= total;
  Grid out(model.rows, model.cols);
  const auto& first = comps[draw_mode(freq, rng)].mean;
  std::copy(first.begin(), first.end(), out.values().begin());
  for (std::size_t r = 1; r < model.rows; ++r) {
    const auto& fit = model.row_fit(condition, r, row_context(out.row(r - 1)));
    std::copy(fit.mean.begin(), fit.mean.end(), out.values().begin() + static_cast<std::ptrdiff_t>(r * model.cols));
  }
  return out;
}

Grid teacher_forced_mse(const ArModel& model, const ToyCorpus& corpus) {
  Grid err(model.rows, model.cols);
  if (corpus.samples.empty()) throw Error(ErrorCode::kEmptySample, "corpus is empty");
  for (const auto& s : corpus.samples) {
    const Grid& g = s.value;
    if (g.rows() != model.rows || g.cols() != model.cols) throw Error(ErrorCode::kShapeMismatch, "corpus shape differs");
    for (std::size_t r = 0; r < model.rows; ++r) {
      const RowFit& fit = r == 0 ? model.row0.at(s.condition)[row_context(g.row(0))]
                                 : model.row_fit(s.condition, r, row_context(g.row(r - 1)));
      for (std::size_t j = 0; j < model.cols; ++j) {
        const double pred = fit.count > 0 ? fit.mean[j] : 0.0;
        const double d = g(r, j) - pred;
        err(r, j) += d * d;
      }
    }
  }
  for (double& v : err.values()) v /= static_cast<double>(corpus.samples.size());
  return err;
}

double mode_coherence(std::span<const Grid> samples, std::span<const Grid> prototypes, double tol) {
  if (samples.empty()) throw Error(ErrorCode::kEmptySample, "mode coherence needs at least one sample");
  if (prototypes.empty()) throw Error(ErrorCode::kInvalidArgument, "mode coherence needs prototypes");
  std::size_t hits = 0;
  for (const auto& s : samples) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : prototypes) best = std::min(best, rms_distance(s, p));
    if (best < tol) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

}  // namespace oversmooth::toylab

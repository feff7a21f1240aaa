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
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oversmooth/core/grid.hpp"
#include "oversmooth/core/rng.hpp"
#include "oversmooth/flow/flow.hpp"
#include "oversmooth/probloss/mixture.hpp"

namespace oversmooth::toylab {

// ---------------------------------------------------------------------------
// Corpora

struct ConditionSpec {
  /// Mode prototypes; all grids in a corpus share one shape (1x1 for scalars).
  std::vector<Grid> prototypes;
  std::vector<double> weights;
  double noise = 0.0;
};

struct ToyCorpusSpec {
  std::vector<ConditionSpec> conditions;
  std::size_t samples_per_condition = 0;
  std::uint64_t seed = 0;

  std::size_t rows() const;
  std::size_t cols() const;
  /// Largest noise scale over conditions.
  double max_noise() const;
  /// Throws kInvalidArgument on an empty condition list, a condition without
  /// modes, weights off the simplex, negative noise or mixed shapes.
  void validate() const;
};

/// Four conditions over 8x8 grids. Mode 0 is two horizontal bands (top rows
/// +a, bottom rows -a), mode 1 two vertical bands (left +b, right -b), with
/// (a, b) running over the four sign pairs. Equal weights, noise 0.05.
ToyCorpusSpec canonical_spec(std::uint64_t seed = 0, std::size_t samples_per_condition = 500);

/// One condition over 1x1 grids with the given scalar modes.
ToyCorpusSpec scalar_spec(std::vector<double> modes, std::vector<double> weights, double noise,
                          std::size_t samples, std::uint64_t seed = 0);

ToyCorpusSpec spec_from_json(std::string_view text);
std::string spec_to_json(const ToyCorpusSpec& spec);

struct ToySample {
  std::size_t condition = 0;
  /// Hidden mode index; only conditioned strategies may read it.
  std::size_t mode = 0;
  Grid value;
};

struct ToyCorpus {
  ToyCorpusSpec spec;
  /// Grouped by condition, in generation order.
  std::vector<ToySample> samples;

  std::vector<Grid> values_of(std::size_t condition) const;
};

/// Samples are prototype[mode] + noise * N(0, 1) per cell; modes are drawn
/// from the condition's weights. Each sample has its own RNG substream.
ToyCorpus make_corpus(const ToyCorpusSpec& spec);

/// One MEL1 file per sample plus manifest.json listing condition, mode, seed and file.
void write_corpus(const ToyCorpus& corpus, const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Table predictors

enum class PointLoss { kMae, kMse };

struct PointwiseModel {
  PointLoss loss = PointLoss::kMse;
  /// Per condition: per-cell sample mean (MSE) or sample median (MAE).
  std::vector<Grid> prediction;
  /// Per condition: per-cell residual variance (MSE) or mean absolute deviation (MAE).
  std::vector<Grid> spread;
};

PointwiseModel fit_pointwise(const ToyCorpus& corpus, PointLoss loss);

struct ConditionedModel {
  /// mean[c][v], variance[c][v]: per-cell MSE fit of the (condition, mode) cell.
  std::vector<std::vector<Grid>> mean;
  std::vector<std::vector<Grid>> variance;
  /// Empirical mode frequencies per condition.
  std::vector<std::vector<double>> frequency;
};

/// Throws kEmptyCondition if any (condition, mode) cell has no samples.
ConditionedModel fit_conditioned(const ToyCorpus& corpus);

/// Draws a mode from the frequency table.
std::size_t draw_mode(std::span<const double> frequency, SeededRng& rng);

/// Two-bit context of a row: bit 1 set when the first half has a negative
/// mean, bit 0 when the second half does. Zero counts as positive.
unsigned row_context(std::span<const double> row);

struct RowFit {
  std::size_t count = 0;
  std::vector<double> mean;
  std::vector<double> variance;
};

struct ArModel {
  std::size_t rows = 0;
  std::size_t cols = 0;
  /// row0[c][ctx]: mixture component for first rows whose own context is ctx.
  std::vector<std::array<RowFit, 4>> row0;
  /// step[c][r - 1][ctx]: fit of row r given the context of row r - 1.
  std::vector<std::vector<std::array<RowFit, 4>>> step;
  /// pooled[c][r - 1]: fallback for contexts never seen in training.
  std::vector<std::vector<RowFit>> pooled;

  const RowFit& row_fit(std::size_t condition, std::size_t row, unsigned ctx) const;
};

/// Row-autoregressive table predictor, fit teacher-forced. Needs grids of at
/// least 2x2; throws kIndistinguishablePrototypes when two different
/// prototypes of one condition share a first-row context.
ArModel fit_ar(const ToyCorpus& corpus);

/// Seeds row 0 from the stored mixture, then rolls forward on its own output.
Grid ar_generate(const ArModel& model, std::size_t condition, SeededRng& rng);

/// Mean squared one-step error per cell with true history (row 0 against
/// the mean of its own context component).
Grid teacher_forced_mse(const ArModel& model, const ToyCorpus& corpus);

/// Fraction of samples whose RMS distance to the nearest prototype is < tol.
double mode_coherence(std::span<const Grid> samples, std::span<const Grid> prototypes, double tol);

// ---------------------------------------------------------------------------
// Strategies

enum class Strategy { kMse, kMae, kLm, kAr, kConditioned, kConditionedLm, kFlow, kConditionedFlow, kGan };

std::string_view strategy_name(Strategy s);
/// Throws kUnknownStrategy naming every valid strategy.
Strategy parse_strategy(std::string_view name);
std::span<const Strategy> all_strategies();
std::string strategy_list();

struct FlowHyper {
  std::size_t steps = 8;
  std::size_t hidden = 16;
  std::size_t epochs = 15;
  std::size_t batch_size = 64;
  double step_size = 5e-3;
  std::size_t restarts = 3;
  double temperature = 1.0;
};

struct GanHyper {
  std::size_t iterations = 200;
  std::size_t batch_size = 16;
  std::size_t latent = 4;
  std::size_t hidden = 32;
  double step_size = 2e-3;
};

struct Hyper {
  /// Generated samples per condition; also the held-out count per condition.
  std::size_t generated = 200;
  /// Coherence tolerance in units of the corpus noise scale.
  double coherence_tol_sigmas = 5.0;
  probloss::FitConfig lm{3, 120, 0.05, 2, probloss::kDefaultScaleFloor, 0};
  FlowHyper flow;
  GanHyper gan;
};

class Generator {
 public:
  virtual ~Generator() = default;
  virtual Grid generate(std::size_t condition, SeededRng& rng) const = 0;
  /// Mean held-out negative log-likelihood in nats per cell, if the model has one.
  virtual std::optional<double> heldout_nll(const ToyCorpus& held_out) const = 0;
};

std::unique_ptr<Generator> fit_strategy(Strategy s, const ToyCorpus& corpus, const Hyper& hyper,
                                        std::uint64_t seed);
std::unique_ptr<Generator> fit_strategy_lm(const ToyCorpus& corpus, const probloss::FitConfig& cfg,
                                           bool conditioned);
std::unique_ptr<Generator> fit_strategy_flow(const ToyCorpus& corpus, const FlowHyper& hyper, std::uint64_t seed,
                                             bool conditioned);
/// Adversarial demonstration: small conditional generator against three tiny
/// discriminators. Not trained to any target quality.
std::unique_ptr<Generator> demo_strategy_gan(const ToyCorpus& corpus, const GanHyper& hyper, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Experiments

struct StrategyRow {
  std::string name;
  /// Mean Var_L over generated grids (grids of at least 3x3 only).
  std::optional<double> var_l;
  std::optional<double> nll;
  /// Mean over (condition, cell) of the dip of generated values.
  double dip = 0.0;
  /// Fraction of (condition, cell) pairs whose dip exceeds the unimodal 95th percentile.
  double bimodal_cells = 0.0;
  double mode_coherence = 0.0;
};

struct ExperimentReport {
  std::uint64_t seed = 0;
  std::size_t generated_per_condition = 0;
  double coherence_tol = 0.0;
  /// 95th percentile of the dip of uniform samples of the generated size.
  double unimodal_dip_p95 = 0.0;
  /// Held-out real samples.
  StrategyRow reference;
  std::vector<StrategyRow> rows;

  const StrategyRow* find(std::string_view name) const;
};

/// Training and held-out corpora are drawn from `spec` with seeds derived
/// from `seed` (spec.seed is not used). Strategies get independent substreams.
ExperimentReport run_experiment(const ToyCorpusSpec& spec, std::span<const Strategy> strategies,
                                std::uint64_t seed, const Hyper& hyper = {});

/// Canonical JSON (sorted keys); wall-clock timings are left out.
std::string report_json(const ExperimentReport& report);
std::string report_markdown(const ExperimentReport& report);

}  // namespace oversmooth::toylab

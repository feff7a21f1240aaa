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
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "oversmooth/core/error.hpp"
#include "oversmooth/core/spectrogram.hpp"
#include "oversmooth/gan/gan.hpp"
#include "oversmooth/toylab/toylab.hpp"

namespace oversmooth::toylab {
namespace {

constexpr double kVarianceFloor = 1e-6;
constexpr double kLaplaceFloor = 1e-3;
constexpr std::uint64_t kFlowStream = 0x464C57;
constexpr std::uint64_t kGanStream = 0x47414E;

constexpr std::array<Strategy, 9> kAll = {Strategy::kMse,         Strategy::kMae,  Strategy::kLm,
                                          Strategy::kAr,          Strategy::kConditioned,
                                          Strategy::kConditionedLm, Strategy::kFlow,
                                          Strategy::kConditionedFlow, Strategy::kGan};

double gaussian_logpdf(double y, double mean, double var) {
  var = std::max(var, kVarianceFloor);
  const double d = y - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * var) + d * d / var);
}

double laplace_logpdf(double y, double median, double scale) {
  scale = std::max(scale, kLaplaceFloor);
  return -std::log(2.0 * scale) - std::abs(y - median) / scale;
}

double log_sum_exp(std::span<const double> xs) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : xs) hi = std::max(hi, x);
  if (!std::isfinite(hi)) return hi;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - hi);
  return hi + std::log(s);
}

std::size_t mode_count(const ToyCorpusSpec& spec) {
  std::size_t v = 0;
  for (const auto& c : spec.conditions) v = std::max(v, c.prototypes.size());
  return v;
}

double per_cell(double total_log_density, const ToyCorpus& held_out) {
  const double cells = static_cast<double>(held_out.spec.rows() * held_out.spec.cols());
  return -total_log_density / (cells * static_cast<double>(held_out.samples.size()));
}

class PointwiseGenerator final : public Generator {
 public:
  explicit PointwiseGenerator(PointwiseModel model) : model_(std::move(model)) {}
  Grid generate(std::size_t condition, SeededRng&) const override { return model_.prediction.at(condition); }
  std::optional<double> heldout_nll(const ToyCorpus& held) const override {
    double total = 0.0;
    for (const auto& s : held.samples) {
      const Grid& pred = model_.prediction.at(s.condition);
      const Grid& spread = model_.spread.at(s.condition);
      for (std::size_t i = 0; i < pred.size(); ++i) {
        const double y = s.value.values()[i];
        total += model_.loss == PointLoss::kMse ? gaussian_logpdf(y, pred.values()[i], spread.values()[i])
                                                : laplace_logpdf(y, pred.values()[i], spread.values()[i]);
      }
    }
    return per_cell(total, held);
  }

 private:
  PointwiseModel model_;
};

class ConditionedGenerator final : public Generator {
 public:
  explicit ConditionedGenerator(ConditionedModel model) : model_(std::move(model)) {}
  Grid generate(std::size_t condition, SeededRng& rng) const override {
    return model_.mean.at(condition)[draw_mode(model_.frequency.at(condition), rng)];
  }
  std::optional<double> heldout_nll(const ToyCorpus& held) const override {
    double total = 0.0;
    std::vector<double> terms;
    for (const auto& s : held.samples) {
      const auto& freq = model_.frequency.at(s.condition);
      terms.clear();
      for (std::size_t v = 0; v < freq.size(); ++v) {
        if (freq[v] <= 0.0) continue;
        double lp = std::log(freq[v]);
        const Grid& mean = model_.mean[s.condition][v];
        const Grid& var = model_.variance[s.condition][v];
        for (std::size_t i = 0; i < mean.size(); ++i) {
          lp += gaussian_logpdf(s.value.values()[i], mean.values()[i], var.values()[i]);
        }
        terms.push_back(lp);
      }
      total += log_sum_exp(terms);
    }
    return per_cell(total, held);
  }

 private:
  ConditionedModel model_;
};

class ArGenerator final : public Generator {
 public:
  explicit ArGenerator(ArModel model) : model_(std::move(model)) {}
  Grid generate(std::size_t condition, SeededRng& rng) const override { return ar_generate(model_, condition, rng); }
  std::optional<double> heldout_nll(const ToyCorpus& held) const override {
    double total = 0.0;
    std::vector<double> terms;
    for (const auto& s : held.samples) {
      const Grid& g = s.value;
      const auto& comps = model_.row0.at(s.condition);
      double count = 0.0;
      for (const auto& comp : comps) count += static_cast<double>(comp.count);
      terms.clear();
      for (const auto& comp : comps) {
        if (comp.count == 0) continue;
        double lp = std::log(static_cast<double>(comp.count) / count);
        for (std::size_t j = 0; j < model_.cols; ++j) lp += gaussian_logpdf(g(0, j), comp.mean[j], comp.variance[j]);
        terms.push_back(lp);
      }
      total += log_sum_exp(terms);
      for (std::size_t r = 1; r < model_.rows; ++r) {
        const RowFit& fit = model_.row_fit(s.condition, r, row_context(g.row(r - 1)));
        for (std::size_t j = 0; j < model_.cols; ++j) total += gaussian_logpdf(g(r, j), fit.mean[j], fit.variance[j]);
      }
    }
    return per_cell(total, held);
  }

 private:
  ArModel model_;
};

class MixtureGenerator final : public Generator {
 public:
  // fields[c][v] with mode frequencies; a single entry per condition when unconditioned.
  MixtureGenerator(std::vector<std::vector<probloss::LaplaceMixtureField>> fields,
                   std::vector<std::vector<double>> frequency)
      : fields_(std::move(fields)), frequency_(std::move(frequency)) {}
  Grid generate(std::size_t condition, SeededRng& rng) const override {
    const std::size_t v = draw_mode(frequency_.at(condition), rng);
    return to_grid(probloss::lm_sample(fields_[condition][v], rng));
  }
  std::optional<double> heldout_nll(const ToyCorpus& held) const override {
    const double cells = static_cast<double>(held.spec.rows() * held.spec.cols());
    double total = 0.0;
    std::vector<double> terms;
    for (const auto& s : held.samples) {
      const Spectrogram y = to_spectrogram(s.value);
      const auto& freq = frequency_.at(s.condition);
      terms.clear();
      for (std::size_t v = 0; v < freq.size(); ++v) {
        if (freq[v] <= 0.0) continue;
        terms.push_back(std::log(freq[v]) - cells * probloss::lm_nll(fields_[s.condition][v], y));
      }
      total += log_sum_exp(terms);
    }
    return per_cell(total, held);
  }

 private:
  std::vector<std::vector<probloss::LaplaceMixtureField>> fields_;
  std::vector<std::vector<double>> frequency_;
};

// Flow targets put grid rows on channels and grid columns on frames.
Grid flow_target(const Grid& sample) { return sample.transposed(); }

class FlowGenerator final : public Generator {
 public:
  FlowGenerator(flow::FlowModel model, std::size_t conditions, std::size_t modes,
                std::vector<std::vector<double>> frequency, double temperature)
      : model_(std::move(model)),
        conditions_(conditions),
        modes_(modes),
        frequency_(std::move(frequency)),
        temperature_(temperature) {}

  Grid condition_grid(std::size_t condition, std::optional<std::size_t> mode) const {
    const auto& cfg = model_.config();
    Grid g(cfg.frames, cfg.cond_dim);
    for (std::size_t t = 0; t < cfg.frames; ++t) {
      g(t, condition) = 1.0;
      if (mode) g(t, conditions_ + *mode) = 1.0;
    }
    return g;
  }

  Grid generate(std::size_t condition, SeededRng& rng) const override {
    std::optional<std::size_t> mode;
    if (modes_ > 0) mode = draw_mode(frequency_.at(condition), rng);
    return flow::sample(model_, condition_grid(condition, mode), rng, temperature_).transposed();
  }

  std::optional<double> heldout_nll(const ToyCorpus& held) const override {
    double total = 0.0;
    if (modes_ == 0) {
      flow::ConditionedBatch batch;
      for (const auto& s : held.samples) {
        batch.targets.push_back(flow_target(s.value));
        batch.conditions.push_back(condition_grid(s.condition, std::nullopt));
      }
      total = -flow::nll(model_, batch) * static_cast<double>(held.samples.size());
      return per_cell(total, held);
    }
    std::vector<double> terms;
    for (const auto& s : held.samples) {
      const auto& freq = frequency_.at(s.condition);
      terms.clear();
      for (std::size_t v = 0; v < freq.size(); ++v) {
        if (freq[v] <= 0.0) continue;
        const flow::ConditionedBatch one{{flow_target(s.value)}, {condition_grid(s.condition, v)}};
        terms.push_back(std::log(freq[v]) - flow::nll(model_, one));
      }
      total += log_sum_exp(terms);
    }
    return per_cell(total, held);
  }

 private:
  flow::FlowModel model_;
  std::size_t conditions_;
  std::size_t modes_;
  std::vector<std::vector<double>> frequency_;
  double temperature_;
};

struct Adam {
  std::vector<double> m, v;
  double p1 = 1.0, p2 = 1.0;

  void step(std::vector<double>& params, const std::vector<double>& grad, double lr) {
    constexpr double b1 = 0.5, b2 = 0.999, eps = 1e-8;
    if (m.empty()) {
      m.assign(params.size(), 0.0);
      v.assign(params.size(), 0.0);
    }
    p1 *= b1;
    p2 *= b2;
    for (std::size_t i = 0; i < params.size(); ++i) {
      m[i] = b1 * m[i] + (1 - b1) * grad[i];
      v[i] = b2 * v[i] + (1 - b2) * grad[i] * grad[i];
      params[i] -= lr * (m[i] / (1 - p1)) / (std::sqrt(v[i] / (1 - p2)) + eps);
    }
  }
};

// y = mid + half * tanh(W2 tanh(W1 [z; onehot(c)] + b1) + b2), reshaped row-major.
class GanGenerator final : public Generator {
 public:
  GanGenerator(std::size_t rows, std::size_t cols, std::size_t conditions, const GanHyper& hyper, double mid,
               double half, SeededRng& rng)
      : rows_(rows), cols_(cols), conditions_(conditions), latent_(hyper.latent), mid_(mid), half_(half) {
    const auto in = static_cast<Eigen::Index>(latent_ + conditions_);
    const auto hid = static_cast<Eigen::Index>(hyper.hidden);
    const auto out = static_cast<Eigen::Index>(rows * cols);
    w1_.resize(hid, in);
    w2_.resize(out, hid);
    for (Eigen::Index i = 0; i < w1_.size(); ++i) w1_.data()[i] = rng.normal() / std::sqrt(static_cast<double>(in));
    for (Eigen::Index i = 0; i < w2_.size(); ++i) w2_.data()[i] = rng.normal() / std::sqrt(static_cast<double>(hid));
    b1_ = Eigen::VectorXd::Zero(hid);
    b2_ = Eigen::VectorXd::Zero(out);
  }

  struct Pass {
    Eigen::VectorXd input, hidden, squashed;
    Grid value;
  };

  Pass run(std::size_t condition, SeededRng& rng) const {
    Pass p;
    p.input = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(latent_ + conditions_));
    for (std::size_t i = 0; i < latent_; ++i) p.input[static_cast<Eigen::Index>(i)] = rng.normal();
    p.input[static_cast<Eigen::Index>(latent_ + condition)] = 1.0;
    p.hidden = (w1_ * p.input + b1_).array().tanh().matrix();
    p.squashed = (w2_ * p.hidden + b2_).array().tanh().matrix();
    p.value = Grid(rows_, cols_);
    for (std::size_t i = 0; i < p.value.size(); ++i) p.value.values()[i] = mid_ + half_ * p.squashed[static_cast<Eigen::Index>(i)];
    return p;
  }

  std::vector<double> parameters() const {
    std::vector<double> flat;
    for (const auto* m : {&w1_, &w2_}) flat.insert(flat.end(), m->data(), m->data() + m->size());
    for (const auto* b : {&b1_, &b2_}) flat.insert(flat.end(), b->data(), b->data() + b->size());
    return flat;
  }

  void set_parameters(const std::vector<double>& flat) {
    std::size_t at = 0;
    for (auto* m : {&w1_, &w2_}) {
      std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(at), m->size(), m->data());
      at += static_cast<std::size_t>(m->size());
    }
    for (auto* b : {&b1_, &b2_}) {
      std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(at), b->size(), b->data());
      at += static_cast<std::size_t>(b->size());
    }
  }

  // Accumulates d(loss)/d(params) given d(loss)/d(value), in parameters() order.
  void backprop(const Pass& p, const Grid& upstream, std::vector<double>& grad) const {
    Eigen::VectorXd g_pre_raw(p.squashed.size());
    for (Eigen::Index i = 0; i < g_pre_raw.size(); ++i) {
      g_pre_raw[i] = upstream.values()[static_cast<std::size_t>(i)] * half_ * (1.0 - p.squashed[i] * p.squashed[i]);
    }
    const Eigen::VectorXd& g_pre = g_pre_raw;
    const Eigen::VectorXd g_hidden =
        ((w2_.transpose() * g_pre).array() * (1.0 - p.hidden.array().square())).matrix();
    const Eigen::MatrixXd dw1 = g_hidden * p.input.transpose();
    const Eigen::MatrixXd dw2 = g_pre * p.hidden.transpose();
    std::size_t at = 0;
    for (const Eigen::MatrixXd* d : {&dw1, &dw2}) {
      for (Eigen::Index i = 0; i < d->size(); ++i) grad[at++] += d->data()[i];
    }
    for (const Eigen::VectorXd* d : {&g_hidden, &g_pre}) {
      for (Eigen::Index i = 0; i < d->size(); ++i) grad[at++] += (*d)[i];
    }
  }

  Grid generate(std::size_t condition, SeededRng& rng) const override { return run(condition, rng).value; }
  std::optional<double> heldout_nll(const ToyCorpus&) const override { return std::nullopt; }

 private:
  std::size_t rows_, cols_, conditions_, latent_;
  double mid_, half_;
  Eigen::MatrixXd w1_, w2_;
  Eigen::VectorXd b1_, b2_;
};

}  // namespace

std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kMse: return "mse";
    case Strategy::kMae: return "mae";
    case Strategy::kLm: return "lm";
    case Strategy::kAr: return "ar";
    case Strategy::kConditioned: return "conditioned";
    case Strategy::kConditionedLm: return "conditioned_lm";
    case Strategy::kFlow: return "flow";
    case Strategy::kConditionedFlow: return "conditioned_flow";
    case Strategy::kGan: return "gan";
  }
  return "?";
}

std::span<const Strategy> all_strategies() { return kAll; }

std::string strategy_list() {
  std::string out;
  for (Strategy s : kAll) {
    if (!out.empty()) out += ", ";
    out += strategy_name(s);
  }
  return out;
}

Strategy parse_strategy(std::string_view name) {
  for (Strategy s : kAll) {
    if (strategy_name(s) == name) return s;
  }
  throw Error(ErrorCode::kUnknownStrategy,
              "unknown strategy '" + std::string(name) + "'; valid strategies: " + strategy_list());
}

std::unique_ptr<Generator> fit_strategy_lm(const ToyCorpus& corpus, const probloss::FitConfig& cfg,
                                           bool conditioned) {
  const auto& spec = corpus.spec;
  const std::size_t conditions = spec.conditions.size();
  std::vector<std::vector<probloss::LaplaceMixtureField>> fields(conditions);
  std::vector<std::vector<double>> frequency(conditions);
  auto fit_group = [&](const std::vector<Spectrogram>& group, std::uint64_t key) {
    probloss::FitConfig c = cfg;
    c.seed = mix64(cfg.seed ^ mix64(key));
    return probloss::fit_lm(group, c).field;
  };
  if (conditioned) {
    const auto table = fit_conditioned(corpus);  // validates every (condition, mode) cell
    for (std::size_t c = 0; c < conditions; ++c) {
      frequency[c] = table.frequency[c];
      for (std::size_t v = 0; v < frequency[c].size(); ++v) {
        std::vector<Spectrogram> group;
        for (const auto& s : corpus.samples) {
          if (s.condition == c && s.mode == v) group.push_back(to_spectrogram(s.value));
        }
        fields[c].push_back(fit_group(group, c * 64 + v));
      }
    }
  } else {
    for (std::size_t c = 0; c < conditions; ++c) {
      std::vector<Spectrogram> group;
      for (const auto& s : corpus.samples) {
        if (s.condition == c) group.push_back(to_spectrogram(s.value));
      }
      if (group.empty()) throw Error(ErrorCode::kEmptyCondition, "condition " + std::to_string(c) + " has no samples");
      fields[c].push_back(fit_group(group, c * 64));
      frequency[c] = {1.0};
    }
  }
  return std::make_unique<MixtureGenerator>(std::move(fields), std::move(frequency));
}

std::unique_ptr<Generator> fit_strategy_flow(const ToyCorpus& corpus, const FlowHyper& hyper, std::uint64_t seed,
                                             bool conditioned) {
  const auto& spec = corpus.spec;
  const std::size_t conditions = spec.conditions.size();
  const std::size_t modes = conditioned ? mode_count(spec) : 0;
  std::vector<std::vector<double>> frequency;
  if (conditioned) frequency = fit_conditioned(corpus).frequency;

  flow::FlowConfig cfg;
  cfg.steps = hyper.steps;
  cfg.channels = spec.rows();
  cfg.frames = spec.cols();
  cfg.cond_dim = conditions + modes;
  cfg.hidden = hyper.hidden;

  // A throwaway generator only to build condition grids with the right layout.
  const FlowGenerator layout(flow::FlowModel(cfg), conditions, modes, frequency, hyper.temperature);
  flow::ConditionedBatch data;
  for (const auto& s : corpus.samples) {
    data.targets.push_back(flow_target(s.value));
    data.conditions.push_back(layout.condition_grid(s.condition, conditioned ? std::optional(s.mode) : std::nullopt));
  }

  std::optional<flow::TrainResult> best;
  std::optional<Error> last_error;
  const SeededRng root(seed, kFlowStream);
  for (std::size_t r = 0; r < std::max<std::size_t>(hyper.restarts, 1); ++r) {
    SeededRng init = root.substream(r);
    flow::TrainConfig tc;
    tc.epochs = hyper.epochs;
    tc.batch_size = hyper.batch_size;
    tc.step_size = hyper.step_size;
    tc.seed = init.next();
    try {
      auto result = flow::train_flow(flow::make_flow(cfg, init), data, tc);
      if (!best || result.final_nll < best->final_nll) best = std::move(result);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDivergence) throw;
      last_error = e;
    }
  }
  if (!best) throw *last_error;
  return std::make_unique<FlowGenerator>(std::move(best->model), conditions, modes, std::move(frequency),
                                         hyper.temperature);
}

std::unique_ptr<Generator> demo_strategy_gan(const ToyCorpus& corpus, const GanHyper& hyper, std::uint64_t seed) {
  const auto& spec = corpus.spec;
  if (corpus.samples.empty()) throw Error(ErrorCode::kEmptySample, "corpus is empty");
  if (spec.rows() < 8 || spec.cols() < 8) {
    throw Error(ErrorCode::kClipTooSmall, "adversarial demo needs grids of at least 8x8");
  }
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : corpus.samples) {
    for (double v : s.value.values()) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const SeededRng root(seed, kGanStream);
  SeededRng init = root.substream(0), draws = root.substream(1), dropout = root.substream(2);
  auto gen = std::make_unique<GanGenerator>(spec.rows(), spec.cols(), spec.conditions.size(), hyper, 0.5 * (lo + hi),
                                            std::max(0.5 * (hi - lo), 1e-3), init);
  std::array<gan::TinyDiscriminator, gan::kDiscriminatorCount> disc;
  for (std::size_t k = 0; k < disc.size(); ++k) {
    SeededRng r = root.substream(10 + k);
    disc[k] = gan::make_discriminator(r);
  }
  std::array<Adam, gan::kDiscriminatorCount> disc_opt;
  Adam gen_opt;
  const std::size_t n = std::max<std::size_t>(hyper.batch_size, 1);
  const double inv_n = 1.0 / static_cast<double>(n);

  for (std::size_t it = 0; it < hyper.iterations; ++it) {
    std::vector<const ToySample*> real(n);
    std::vector<GanGenerator::Pass> fake(n);
    for (std::size_t i = 0; i < n; ++i) {
      real[i] = &corpus.samples[draws.uniform_index(corpus.samples.size())];
      fake[i] = gen->run(real[i]->condition, draws);
    }
    // Discriminators: minimise mean (D(real) - 1)^2 + mean D(fake)^2.
    for (std::size_t k = 0; k < disc.size(); ++k) {
      std::vector<double> params(disc[k].parameters().begin(), disc[k].parameters().end());
      std::vector<double> grad(params.size(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const auto r = gan::discriminator_score_grad(disc[k], real[i]->value, &dropout);
        const auto f = gan::discriminator_score_grad(disc[k], fake[i].value, &dropout);
        for (std::size_t p = 0; p < grad.size(); ++p) {
          grad[p] += inv_n * (2.0 * (r.score - 1.0) * r.params[p] + 2.0 * f.score * f.params[p]);
        }
      }
      disc_opt[k].step(params, grad, hyper.step_size);
      disc[k].set_parameters(params);
    }
    // Generator: minimise the mean over discriminators of mean (D(fake) - 1)^2.
    std::vector<double> gparams = gen->parameters();
    std::vector<double> ggrad(gparams.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto pass = gen->run(real[i]->condition, draws);
      Grid upstream(spec.rows(), spec.cols());
      for (std::size_t k = 0; k < disc.size(); ++k) {
        const auto g = gan::discriminator_score_grad(disc[k], pass.value, &dropout);
        const double w = 2.0 * (g.score - 1.0) * inv_n / static_cast<double>(disc.size());
        for (std::size_t c = 0; c < upstream.size(); ++c) upstream.values()[c] += w * g.clip.values()[c];
      }
      gen->backprop(pass, upstream, ggrad);
    }
    gen_opt.step(gparams, ggrad, hyper.step_size);
    gen->set_parameters(gparams);
  }
  return gen;
}

std::unique_ptr<Generator> fit_strategy(Strategy s, const ToyCorpus& corpus, const Hyper& hyper,
                                        std::uint64_t seed) {
  switch (s) {
    case Strategy::kMse: return std::make_unique<PointwiseGenerator>(fit_pointwise(corpus, PointLoss::kMse));
    case Strategy::kMae: return std::make_unique<PointwiseGenerator>(fit_pointwise(corpus, PointLoss::kMae));
    case Strategy::kAr: return std::make_unique<ArGenerator>(fit_ar(corpus));
    case Strategy::kConditioned: return std::make_unique<ConditionedGenerator>(fit_conditioned(corpus));
    case Strategy::kLm:
    case Strategy::kConditionedLm: {
      probloss::FitConfig cfg = hyper.lm;
      cfg.seed = seed;
      return fit_strategy_lm(corpus, cfg, s == Strategy::kConditionedLm);
    }
    case Strategy::kFlow: return fit_strategy_flow(corpus, hyper.flow, seed, false);
    case Strategy::kConditionedFlow: return fit_strategy_flow(corpus, hyper.flow, seed, true);
    case Strategy::kGan: return demo_strategy_gan(corpus, hyper.gan, seed);
  }
  throw Error(ErrorCode::kUnknownStrategy, "unknown strategy");
}

}  // namespace oversmooth::toylab

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

#include "oversmooth/flow/flow.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "flow_math.hpp"
#include "oversmooth/core/error.hpp"

namespace oversmooth::flow {
namespace {

void check_config(const FlowConfig& cfg) {
  if (cfg.channels == 0 || cfg.frames == 0) throw Error(ErrorCode::kInvalidArgument, "flow needs channels and frames");
  if (cfg.hidden == 0) throw Error(ErrorCode::kInvalidArgument, "coupling hidden width must be positive");
}

void require_initialized(const FlowModel& model) {
  if (!model.initialized()) throw Error(ErrorCode::kUninitialized, "flow model has not been initialized");
}

struct MixFactors {
  Eigen::MatrixXd inverse;
  double log_abs_det = 0.0;
};

MixFactors factor_mix(const Eigen::MatrixXd& w) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(w);
  const double det = lu.determinant();
  if (!std::isfinite(det)) throw Error(ErrorCode::kNonFinite, "channel mix determinant is not finite");
  if (det == 0.0) throw Error(ErrorCode::kInvalidArgument, "channel mix matrix is singular");
  return {lu.inverse(), std::log(std::abs(det))};
}

double log_abs_scale_sum(const Eigen::VectorXd& s) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] == 0.0) throw Error(ErrorCode::kInvalidArgument, "actnorm scale is zero");
    acc += std::log(std::abs(s[i]));
  }
  return acc;
}

// Conditioner input for every sample: kept half of all frames, then the condition.
Eigen::MatrixXd conditioner_input(const FlowConfig& cfg, const Eigen::MatrixXd& x, const Eigen::MatrixXd& cond,
                                  std::size_t count) {
  const std::size_t t_len = cfg.frames, c1 = cfg.first_half(), d = cfg.cond_dim;
  Eigen::MatrixXd in(static_cast<Eigen::Index>(cfg.conditioner_inputs()), static_cast<Eigen::Index>(count));
  for (std::size_t b = 0; b < count; ++b) {
    for (std::size_t t = 0; t < t_len; ++t) {
      for (std::size_t i = 0; i < c1; ++i) {
        in(static_cast<Eigen::Index>(t * c1 + i), static_cast<Eigen::Index>(b)) =
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b * t_len + t));
      }
    }
  }
  if (d > 0) in.bottomRows(static_cast<Eigen::Index>(t_len * d)) = cond;
  return in;
}

// Raw conditioner output to (log-scale, shift), both laid out like the second half of the data.
void split_output(const FlowConfig& cfg, const Eigen::MatrixXd& out, std::size_t count, Eigen::MatrixXd& log_scale,
                  Eigen::MatrixXd& shift) {
  const std::size_t t_len = cfg.frames, c2 = cfg.second_half();
  log_scale.resize(static_cast<Eigen::Index>(c2), static_cast<Eigen::Index>(count * t_len));
  shift.resizeLike(log_scale);
  for (std::size_t b = 0; b < count; ++b) {
    for (std::size_t t = 0; t < t_len; ++t) {
      for (std::size_t j = 0; j < c2; ++j) {
        const auto col = static_cast<Eigen::Index>(b * t_len + t);
        const double raw = out(static_cast<Eigen::Index>(t * c2 + j), static_cast<Eigen::Index>(b));
        log_scale(static_cast<Eigen::Index>(j), col) = kLogScaleBound * std::tanh(raw / kLogScaleBound);
        shift(static_cast<Eigen::Index>(j), col) =
            out(static_cast<Eigen::Index>(t_len * c2 + t * c2 + j), static_cast<Eigen::Index>(b));
      }
    }
  }
}

Eigen::MatrixXd conditioner_hidden(const FlowStep& st, const Eigen::MatrixXd& in) {
  Eigen::MatrixXd h = st.w1 * in;
  h.colwise() += st.b1;
  return h.array().tanh().matrix();
}

Eigen::MatrixXd conditioner_output(const FlowStep& st, const Eigen::MatrixXd& hidden) {
  Eigen::MatrixXd out = st.w2 * hidden;
  out.colwise() += st.b2;
  return out;
}

void check_grid(const Grid& g, std::size_t rows, std::size_t cols, const char* what) {
  if (g.rows() != rows || g.cols() != cols) {
    throw Error(ErrorCode::kShapeMismatch, std::string(what) + " is " + std::to_string(g.rows()) + "x" +
                                               std::to_string(g.cols()) + ", model expects " + std::to_string(rows) +
                                               "x" + std::to_string(cols));
  }
}

}  // namespace

FlowModel::FlowModel(const FlowConfig& cfg) : cfg_(cfg) {
  check_config(cfg);
  const auto c = static_cast<Eigen::Index>(cfg.channels);
  const auto h = static_cast<Eigen::Index>(cfg.hidden);
  const auto in = static_cast<Eigen::Index>(cfg.conditioner_inputs());
  const auto out = static_cast<Eigen::Index>(cfg.conditioner_outputs());
  steps_.resize(cfg.steps);
  for (auto& st : steps_) {
    st.scale = Eigen::VectorXd::Ones(c);
    st.bias = Eigen::VectorXd::Zero(c);
    st.mix = Eigen::MatrixXd::Identity(c, c);
    st.w1 = Eigen::MatrixXd::Zero(h, in);
    st.b1 = Eigen::VectorXd::Zero(h);
    st.w2 = Eigen::MatrixXd::Zero(out, h);
    st.b2 = Eigen::VectorXd::Zero(out);
  }
}

std::size_t FlowModel::parameter_count() const {
  const std::size_t c = cfg_.channels, h = cfg_.hidden;
  const std::size_t per = 2 * c + c * c + h * cfg_.conditioner_inputs() + h + cfg_.conditioner_outputs() * h +
                          cfg_.conditioner_outputs();
  return per * steps_.size();
}

namespace detail {

void append_step(const FlowStep& st, std::vector<double>& out) {
  auto put_vec = [&](const Eigen::VectorXd& v) { out.insert(out.end(), v.data(), v.data() + v.size()); };
  auto put_mat = [&](const Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
    }
  };
  put_vec(st.scale);
  put_vec(st.bias);
  put_mat(st.mix);
  put_mat(st.w1);
  put_vec(st.b1);
  put_mat(st.w2);
  put_vec(st.b2);
}

}  // namespace detail

std::vector<double> FlowModel::parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const auto& st : steps_) detail::append_step(st, out);
  return out;
}

void FlowModel::set_parameters(std::span<const double> flat) {
  if (flat.size() != parameter_count()) {
    throw Error(ErrorCode::kDimensionMismatch, "flow expects " + std::to_string(parameter_count()) +
                                                   " parameters, got " + std::to_string(flat.size()));
  }
  for (double v : flat) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFinite, "flow parameter is not finite");
  }
  std::size_t pos = 0;
  auto get_vec = [&](Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = flat[pos++];
  };
  auto get_mat = [&](Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = flat[pos++];
    }
  };
  for (auto& st : steps_) {
    get_vec(st.scale);
    get_vec(st.bias);
    get_mat(st.mix);
    get_mat(st.w1);
    get_vec(st.b1);
    get_mat(st.w2);
    get_vec(st.b2);
  }
}

FlowModel make_identity_flow(const FlowConfig& cfg) {
  FlowModel m(cfg);
  m.mark_initialized();
  return m;
}

FlowModel make_flow(const FlowConfig& cfg, SeededRng& rng) {
  FlowModel m(cfg);
  const auto c = static_cast<Eigen::Index>(cfg.channels);
  const double in_scale = cfg.conditioner_inputs() > 0 ? 1.0 / std::sqrt(static_cast<double>(cfg.conditioner_inputs())) : 0.0;
  for (auto& st : m.steps()) {
    Eigen::MatrixXd g(c, c);
    for (Eigen::Index r = 0; r < c; ++r) {
      for (Eigen::Index k = 0; k < c; ++k) g(r, k) = rng.normal();
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(c, c);
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < c; ++k) {
      if (r(k, k) < 0.0) q.col(k) *= -1.0;
    }
    if (q.determinant() < 0.0) q.col(0) *= -1.0;
    st.mix = q;
    for (Eigen::Index r2 = 0; r2 < st.w1.rows(); ++r2) {
      for (Eigen::Index k = 0; k < st.w1.cols(); ++k) st.w1(r2, k) = rng.normal() * in_scale;
    }
  }
  return m;
}

namespace detail {

PackedBatch pack(const FlowConfig& cfg, const ConditionedBatch& batch) {
  const std::size_t n = batch.targets.size();
  if (n == 0) throw Error(ErrorCode::kEmptySample, "flow batch is empty");
  const std::size_t t_len = cfg.frames, c = cfg.channels, d = cfg.cond_dim;
  if (d > 0 && batch.conditions.size() != n) {
    throw Error(ErrorCode::kShapeMismatch, "batch has " + std::to_string(n) + " targets but " +
                                               std::to_string(batch.conditions.size()) + " conditions");
  }
  if (d == 0 && !batch.conditions.empty() && batch.conditions.size() != n) {
    throw Error(ErrorCode::kShapeMismatch, "condition count differs from target count");
  }
  PackedBatch p;
  p.count = n;
  p.data.resize(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(n * t_len));
  p.cond.resize(static_cast<Eigen::Index>(t_len * d), static_cast<Eigen::Index>(n));
  for (std::size_t b = 0; b < n; ++b) {
    const Grid& y = batch.targets[b];
    check_grid(y, t_len, c, "target");
    for (std::size_t t = 0; t < t_len; ++t) {
      for (std::size_t ch = 0; ch < c; ++ch) {
        const double v = y(t, ch);
        if (!std::isfinite(v)) throw Error(ErrorCode::kNonFinite, "flow target is not finite");
        p.data(static_cast<Eigen::Index>(ch), static_cast<Eigen::Index>(b * t_len + t)) = v;
      }
    }
    if (!batch.conditions.empty()) {
      const Grid& x = batch.conditions[b];
      if (d == 0 && x.size() == 0) continue;
      check_grid(x, t_len, d, "condition");
      for (std::size_t i = 0; i < t_len * d; ++i) {
        p.cond(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b)) = x.values()[i];
      }
    }
  }
  return p;
}

PackedBatch pack_one(const FlowConfig& cfg, const Grid& y, const Grid& cond) {
  ConditionedBatch b{{y}, {}};
  if (cfg.cond_dim > 0 || cond.size() > 0) b.conditions.push_back(cond);
  return pack(cfg, b);
}

Grid unpack_one(const FlowConfig& cfg, const Eigen::MatrixXd& data) {
  Grid g(cfg.frames, cfg.channels);
  for (std::size_t t = 0; t < cfg.frames; ++t) {
    for (std::size_t ch = 0; ch < cfg.channels; ++ch) {
      g(t, ch) = data(static_cast<Eigen::Index>(ch), static_cast<Eigen::Index>(t));
    }
  }
  return g;
}

EncodeResult encode(const FlowModel& model, const PackedBatch& batch, bool keep) {
  const auto& cfg = model.config();
  const std::size_t n = batch.count, t_len = cfg.frames, c1 = cfg.first_half(), c2 = cfg.second_half();
  EncodeResult r;
  r.z = batch.data;
  r.logdet = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  const double frames = static_cast<double>(t_len);
  Eigen::MatrixXd log_scale, shift;
  for (const auto& st : model.steps()) {
    StepCache cache;
    if (keep) cache.input = r.z;
    const auto mix = factor_mix(st.mix);
    r.logdet.array() += frames * (log_abs_scale_sum(st.scale) - mix.log_abs_det);
    Eigen::MatrixXd h = st.scale.asDiagonal() * r.z;
    h.colwise() += st.bias;
    if (keep) cache.normed = h;
    r.z.noalias() = mix.inverse * h;
    if (c2 > 0) {
      Eigen::MatrixXd in = conditioner_input(cfg, r.z, batch.cond, n);
      Eigen::MatrixXd hidden = conditioner_hidden(st, in);
      split_output(cfg, conditioner_output(st, hidden), n, log_scale, shift);
      auto second = r.z.bottomRows(static_cast<Eigen::Index>(c2));
      second = ((second - shift).array() * (-log_scale.array()).exp()).matrix();
      for (std::size_t b = 0; b < n; ++b) {
        r.logdet[static_cast<Eigen::Index>(b)] -=
            log_scale.middleCols(static_cast<Eigen::Index>(b * t_len), static_cast<Eigen::Index>(t_len)).sum();
      }
      if (keep) {
        cache.cond_in = std::move(in);
        cache.hidden = std::move(hidden);
        cache.log_scale = log_scale;
        cache.coupled = second;
      }
    }
    (void)c1;
    if (keep) r.caches.push_back(std::move(cache));
  }
  return r;
}

Eigen::VectorXd decode(const FlowModel& model, Eigen::MatrixXd& x, const Eigen::MatrixXd& cond, std::size_t count) {
  const auto& cfg = model.config();
  const std::size_t t_len = cfg.frames, c2 = cfg.second_half();
  Eigen::VectorXd logdet = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(count));
  const double frames = static_cast<double>(t_len);
  Eigen::MatrixXd log_scale, shift;
  for (auto it = model.steps().rbegin(); it != model.steps().rend(); ++it) {
    const auto& st = *it;
    if (c2 > 0) {
      const Eigen::MatrixXd in = conditioner_input(cfg, x, cond, count);
      split_output(cfg, conditioner_output(st, conditioner_hidden(st, in)), count, log_scale, shift);
      auto second = x.bottomRows(static_cast<Eigen::Index>(c2));
      second = (second.array() * log_scale.array().exp() + shift.array()).matrix();
      for (std::size_t b = 0; b < count; ++b) {
        logdet[static_cast<Eigen::Index>(b)] +=
            log_scale.middleCols(static_cast<Eigen::Index>(b * t_len), static_cast<Eigen::Index>(t_len)).sum();
      }
    }
    const auto mix = factor_mix(st.mix);
    logdet.array() += frames * (mix.log_abs_det - log_abs_scale_sum(st.scale));
    Eigen::MatrixXd h = st.mix * x;
    h.colwise() -= st.bias;
    x = st.scale.cwiseInverse().asDiagonal() * h;
  }
  return logdet;
}

Eigen::VectorXd sample_nll(const FlowConfig& cfg, const EncodeResult& enc, std::size_t count) {
  const std::size_t t_len = cfg.frames;
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  Eigen::VectorXd out(static_cast<Eigen::Index>(count));
  for (std::size_t b = 0; b < count; ++b) {
    const double sq =
        enc.z.middleCols(static_cast<Eigen::Index>(b * t_len), static_cast<Eigen::Index>(t_len)).squaredNorm();
    out[static_cast<Eigen::Index>(b)] = 0.5 * sq + static_cast<double>(cfg.dimension()) * half_log_2pi -
                                        enc.logdet[static_cast<Eigen::Index>(b)];
  }
  return out;
}

}  // namespace detail

void actnorm_init(FlowModel& model, const ConditionedBatch& batch) {
  if (model.initialized()) throw Error(ErrorCode::kInvalidArgument, "flow model is already initialized");
  const auto& cfg = model.config();
  const auto packed = detail::pack(cfg, batch);
  Eigen::MatrixXd x = packed.data;
  const auto cols = static_cast<double>(x.cols());
  const std::size_t c2 = cfg.second_half();
  Eigen::MatrixXd log_scale, shift;
  for (std::size_t k = 0; k < model.steps().size(); ++k) {
    auto& st = model.steps()[k];
    const Eigen::VectorXd mean = x.rowwise().sum() / cols;
    const Eigen::VectorXd var = (x.colwise() - mean).array().square().rowwise().sum() / cols;
    for (Eigen::Index ch = 0; ch < var.size(); ++ch) {
      const double sd = std::sqrt(var[ch]);
      if (!(sd > 1e-12 * (1.0 + std::abs(mean[ch])))) {
        throw Error(ErrorCode::kDegenerateChannel, "channel " + std::to_string(ch) + " has zero variance at step " +
                                                       std::to_string(k));
      }
      st.scale[ch] = 1.0 / sd;
      st.bias[ch] = -mean[ch] / sd;
    }
    Eigen::MatrixXd h = st.scale.asDiagonal() * x;
    h.colwise() += st.bias;
    x = factor_mix(st.mix).inverse * h;
    if (c2 > 0) {
      const Eigen::MatrixXd in = conditioner_input(cfg, x, packed.cond, packed.count);
      split_output(cfg, conditioner_output(st, conditioner_hidden(st, in)), packed.count, log_scale, shift);
      auto second = x.bottomRows(static_cast<Eigen::Index>(c2));
      second = ((second - shift).array() * (-log_scale.array()).exp()).matrix();
    }
  }
  model.mark_initialized();
}

FlowResult forward(const FlowModel& model, const Grid& z, const Grid& cond) {
  require_initialized(model);
  auto packed = detail::pack_one(model.config(), z, cond);
  const auto logdet = detail::decode(model, packed.data, packed.cond, 1);
  return {detail::unpack_one(model.config(), packed.data), logdet[0]};
}

FlowResult inverse(const FlowModel& model, const Grid& y, const Grid& cond) {
  require_initialized(model);
  const auto packed = detail::pack_one(model.config(), y, cond);
  const auto enc = detail::encode(model, packed, false);
  return {detail::unpack_one(model.config(), enc.z), enc.logdet[0]};
}

double nll(const FlowModel& model, const ConditionedBatch& batch) {
  require_initialized(model);
  const auto packed = detail::pack(model.config(), batch);
  const auto enc = detail::encode(model, packed, false);
  const double v = detail::sample_nll(model.config(), enc, packed.count).mean();
  if (!std::isfinite(v)) throw Error(ErrorCode::kNonFinite, "flow NLL is not finite");
  return v;
}

NllGradient nll_gradient(const FlowModel& model, const ConditionedBatch& batch) {
  require_initialized(model);
  const auto& cfg = model.config();
  const auto packed = detail::pack(cfg, batch);
  const auto enc = detail::encode(model, packed, true);
  const std::size_t n = packed.count, t_len = cfg.frames, c1 = cfg.first_half(), c2 = cfg.second_half();
  const double inv_n = 1.0 / static_cast<double>(n);
  const double frames = static_cast<double>(t_len);

  NllGradient out;
  out.nll = detail::sample_nll(cfg, enc, n).mean();
  if (!std::isfinite(out.nll)) throw Error(ErrorCode::kNonFinite, "flow NLL is not finite");

  std::vector<FlowStep> grads(model.steps().size());
  Eigen::MatrixXd g = enc.z * inv_n;
  for (std::size_t k = model.steps().size(); k-- > 0;) {
    const auto& st = model.steps()[k];
    const auto& cache = enc.caches[k];
    auto& gs = grads[k];
    gs.w1 = Eigen::MatrixXd::Zero(st.w1.rows(), st.w1.cols());
    gs.b1 = Eigen::VectorXd::Zero(st.b1.size());
    gs.w2 = Eigen::MatrixXd::Zero(st.w2.rows(), st.w2.cols());
    gs.b2 = Eigen::VectorXd::Zero(st.b2.size());

    if (c2 > 0) {
      const auto gb = g.bottomRows(static_cast<Eigen::Index>(c2));
      const Eigen::ArrayXXd e = (-cache.log_scale.array()).exp();
      const Eigen::ArrayXXd d_shift = -(gb.array() * e);
      const Eigen::ArrayXXd d_log_scale = -(gb.array() * cache.coupled.array()) + inv_n;
      const Eigen::ArrayXXd ratio = cache.log_scale.array() / kLogScaleBound;
      const Eigen::ArrayXXd d_raw = d_log_scale * (1.0 - ratio.square());
      Eigen::MatrixXd d_out(static_cast<Eigen::Index>(cfg.conditioner_outputs()), static_cast<Eigen::Index>(n));
      for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t t = 0; t < t_len; ++t) {
          for (std::size_t j = 0; j < c2; ++j) {
            const auto col = static_cast<Eigen::Index>(b * t_len + t);
            d_out(static_cast<Eigen::Index>(t * c2 + j), static_cast<Eigen::Index>(b)) =
                d_raw(static_cast<Eigen::Index>(j), col);
            d_out(static_cast<Eigen::Index>(t_len * c2 + t * c2 + j), static_cast<Eigen::Index>(b)) =
                d_shift(static_cast<Eigen::Index>(j), col);
          }
        }
      }
      gs.w2.noalias() = d_out * cache.hidden.transpose();
      gs.b2 = d_out.rowwise().sum();
      const Eigen::MatrixXd d_pre =
          ((st.w2.transpose() * d_out).array() * (1.0 - cache.hidden.array().square())).matrix();
      gs.w1.noalias() = d_pre * cache.cond_in.transpose();
      gs.b1 = d_pre.rowwise().sum();
      const Eigen::MatrixXd d_in = st.w1.transpose() * d_pre;
      Eigen::MatrixXd gh = g;
      gh.bottomRows(static_cast<Eigen::Index>(c2)) = (gb.array() * e).matrix();
      for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t t = 0; t < t_len; ++t) {
          for (std::size_t i = 0; i < c1; ++i) {
            gh(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b * t_len + t)) +=
                d_in(static_cast<Eigen::Index>(t * c1 + i), static_cast<Eigen::Index>(b));
          }
        }
      }
      g = std::move(gh);
    }

    // Mixing: h' = V h with V = W^-1, plus the -T log|det V| term.
    const auto mix = factor_mix(st.mix);
    const Eigen::MatrixXd& v = mix.inverse;
    const Eigen::MatrixXd d_v = g * cache.normed.transpose() - frames * st.mix.transpose();
    gs.mix = -v.transpose() * d_v * v.transpose();
    Eigen::MatrixXd d_normed = v.transpose() * g;

    // Actnorm: h = s x + b, plus the -T sum log|s| term.
    gs.scale = (d_normed.array() * cache.input.array()).rowwise().sum().matrix() - frames * st.scale.cwiseInverse();
    gs.bias = d_normed.rowwise().sum();
    g = st.scale.asDiagonal() * d_normed;
  }
  out.grad.reserve(model.parameter_count());
  for (const auto& gs : grads) detail::append_step(gs, out.grad);
  return out;
}

Grid sample(const FlowModel& model, const Grid& cond, SeededRng& rng, double temperature) {
  require_initialized(model);
  if (!(temperature > 0.0)) throw Error(ErrorCode::kInvalidArgument, "temperature must be positive");
  const auto& cfg = model.config();
  Grid z(cfg.frames, cfg.channels);
  for (double& v : z.values()) v = temperature * rng.normal();
  return forward(model, z, cond).value;
}

}  // namespace oversmooth::flow

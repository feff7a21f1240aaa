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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

#include "oversmooth/core/error.hpp"

namespace oversmooth::flow {
namespace {

ConditionedBatch subset(const ConditionedBatch& data, std::span<const std::size_t> idx) {
  ConditionedBatch out;
  out.targets.reserve(idx.size());
  for (auto i : idx) out.targets.push_back(data.targets[i]);
  if (!data.conditions.empty()) {
    out.conditions.reserve(idx.size());
    for (auto i : idx) out.conditions.push_back(data.conditions[i]);
  }
  return out;
}

// Once training has moved the parameters, a non-finite value or a singular
// mix can only come from the optimizer running away.
bool diverged(const Error& e) {
  return e.code() == ErrorCode::kNonFinite || e.code() == ErrorCode::kInvalidArgument;
}

double checked_nll(const FlowModel& model, const ConditionedBatch& data) {
  try {
    return nll(model, data);
  } catch (const Error& e) {
    if (diverged(e)) throw Error(ErrorCode::kDivergence, std::string("flow training diverged: ") + e.what());
    throw;
  }
}

}  // namespace

TrainResult train_flow(FlowModel model, const ConditionedBatch& data, const TrainConfig& cfg) {
  if (data.size() == 0) throw Error(ErrorCode::kEmptySample, "no training data");
  if (cfg.batch_size == 0) throw Error(ErrorCode::kInvalidArgument, "batch size must be positive");
  if (!(cfg.step_size > 0.0)) throw Error(ErrorCode::kInvalidArgument, "step size must be positive");

  SeededRng rng(cfg.seed, 0x464C4F57);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  auto shuffle = [&] {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.uniform_index(i)]);
  };
  shuffle();
  const std::size_t batch = std::min(cfg.batch_size, data.size());
  if (!model.initialized()) actnorm_init(model, subset(data, std::span(order).first(batch)));

  TrainResult result;
  std::vector<double> params = model.parameters();
  std::vector<double> best = params;
  double best_nll = checked_nll(model, data);
  result.initial_nll = best_nll;
  result.curve.push_back({0, best_nll});

  std::vector<double> m(params.size(), 0.0), v(params.size(), 0.0);
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  double p1 = 1.0, p2 = 1.0;
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (epoch > 0) shuffle();
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t len = std::min(batch, order.size() - start);
      NllGradient g;
      try {
        g = nll_gradient(model, subset(data, std::span(order).subspan(start, len)));
      } catch (const Error& e) {
        if (diverged(e)) {
          throw Error(ErrorCode::kDivergence, "flow training diverged at step " + std::to_string(step) + ": " + e.what());
        }
        throw;
      }
      ++step;
      p1 *= b1;
      p2 *= b2;
      for (std::size_t i = 0; i < params.size(); ++i) {
        m[i] = b1 * m[i] + (1.0 - b1) * g.grad[i];
        v[i] = b2 * v[i] + (1.0 - b2) * g.grad[i] * g.grad[i];
        params[i] -= cfg.step_size * (m[i] / (1.0 - p1)) / (std::sqrt(v[i] / (1.0 - p2)) + eps);
      }
      try {
        model.set_parameters(params);
      } catch (const Error& e) {
        if (diverged(e)) throw Error(ErrorCode::kDivergence, std::string("flow parameters diverged: ") + e.what());
        throw;
      }
    }
    const double full = checked_nll(model, data);
    result.curve.push_back({step, full});
    if (full < best_nll) {
      best_nll = full;
      best = params;
    }
  }

  if (cfg.quantize_result) {
    for (double& p : best) p = static_cast<double>(static_cast<float>(p));
  }
  model.set_parameters(best);
  result.final_nll = checked_nll(model, data);
  if (cfg.quantize_result) result.curve.push_back({step, result.final_nll});
  result.model = std::move(model);
  return result;
}

std::string curve_csv(const std::vector<CurvePoint>& curve) {
  std::string out = "step,nll\n";
  char buf[96];
  for (const auto& p : curve) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", p.step, p.nll);
    out += buf;
  }
  return out;
}

}  // namespace oversmooth::flow

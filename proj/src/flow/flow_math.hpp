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

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

#include "oversmooth/flow/flow.hpp"

namespace oversmooth::flow::detail {

/// A batch laid out for the passes: data is channels x (B * T) with column
/// b * T + t; conditions are (T * cond_dim) x B with row t * cond_dim + j.
struct PackedBatch {
  Eigen::MatrixXd data;
  Eigen::MatrixXd cond;
  std::size_t count = 0;
};

PackedBatch pack(const FlowConfig& cfg, const ConditionedBatch& batch);
PackedBatch pack_one(const FlowConfig& cfg, const Grid& y, const Grid& cond);
Grid unpack_one(const FlowConfig& cfg, const Eigen::MatrixXd& data);

struct StepCache {
  Eigen::MatrixXd input;
  Eigen::MatrixXd normed;
  Eigen::MatrixXd cond_in;
  Eigen::MatrixXd hidden;
  Eigen::MatrixXd log_scale;
  Eigen::MatrixXd coupled;
};

struct EncodeResult {
  Eigen::MatrixXd z;
  Eigen::VectorXd logdet;
  std::vector<StepCache> caches;
};

/// Data to latent; logdet is per sample. `keep` retains per-step caches for backprop.
EncodeResult encode(const FlowModel& model, const PackedBatch& batch, bool keep);

/// Latent to data in place; returns per-sample logdet of the generating map.
Eigen::VectorXd decode(const FlowModel& model, Eigen::MatrixXd& x, const Eigen::MatrixXd& cond, std::size_t count);

/// Per-sample NLL from an encoding.
Eigen::VectorXd sample_nll(const FlowConfig& cfg, const EncodeResult& enc, std::size_t count);

void append_step(const FlowStep& step, std::vector<double>& out);

}  // namespace oversmooth::flow::detail

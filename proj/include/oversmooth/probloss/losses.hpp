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

#include "oversmooth/core/spectrogram.hpp"
#include "oversmooth/metrics/ssim.hpp"

namespace oversmooth::probloss {

enum class ElementwiseKind { kMae, kMse };

/// Mean of |pred - target| or (pred - target)^2 over all cells.
double elementwise_loss(ElementwiseKind kind, const Spectrogram& pred, const Spectrogram& target);

/// 1 - SSIM; lies in [0, 2].
double ssim_loss(const Spectrogram& pred, const Spectrogram& target, const metrics::SsimConfig& cfg = {});

}  // namespace oversmooth::probloss

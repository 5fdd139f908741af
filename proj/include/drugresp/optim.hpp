// Copyright 2026 The drugresp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DRUGRESP_OPTIM_HPP_
#define DRUGRESP_OPTIM_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "drugresp/autodiff.hpp"

namespace drugresp {

struct AdamOptions {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamOptions options;
  std::uint64_t step = 0;
  std::vector<Tensor> m;
  std::vector<Tensor> v;

  // Moment buffers sized to match `params`.
  static AdamState create(std::span<const Variable> params, AdamOptions options = {});
};

// One bias-corrected Adam update using each parameter's accumulated gradient.
// Coordinates whose gradient is exactly zero keep their value and moments, so
// a zero gradient never moves a parameter regardless of the state.
void adam_step(std::span<Variable> params, AdamState& state);

}  // namespace drugresp

#endif  // DRUGRESP_OPTIM_HPP_

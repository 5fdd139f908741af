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

#include "drugresp/optim.hpp"

#include <cmath>

#include <fmt/format.h>

#include "drugresp/error.hpp"

namespace drugresp {

AdamState AdamState::create(std::span<const Variable> params, AdamOptions options) {
  AdamState state;
  state.options = options;
  for (const auto& p : params) {
    state.m.emplace_back(p.value().rows(), p.value().cols());
    state.v.emplace_back(p.value().rows(), p.value().cols());
  }
  return state;
}

void adam_step(std::span<Variable> params, AdamState& state) {
  if (params.size() != state.m.size() || params.size() != state.v.size()) {
    throw Error(ErrorKind::kShape, fmt::format("adam_step: {} parameters but state holds {}",
                                               params.size(), state.m.size()));
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (!params[k].value().same_shape(state.m[k]) || !params[k].value().same_shape(state.v[k])) {
      throw Error(ErrorKind::kShape,
                  fmt::format("adam_step: parameter {} has shape {}, moments {}", k,
                              params[k].value().shape_string(), state.m[k].shape_string()));
    }
  }

  const AdamOptions& o = state.options;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(o.beta1, t);
  const double correction2 = 1.0 - std::pow(o.beta2, t);

  for (std::size_t k = 0; k < params.size(); ++k) {
    if (!params[k].has_grad()) continue;
    const Tensor& g = params[k].grad();
    Tensor& w = params[k].mutable_value();
    Tensor& m = state.m[k];
    Tensor& v = state.v[k];
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double gi = g[i];
      if (gi == 0.0) continue;
      m[i] = o.beta1 * m[i] + (1.0 - o.beta1) * gi;
      v[i] = o.beta2 * v[i] + (1.0 - o.beta2) * gi * gi;
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      w[i] -= o.lr * m_hat / (std::sqrt(v_hat) + o.epsilon);
    }
  }
}

}  // namespace drugresp

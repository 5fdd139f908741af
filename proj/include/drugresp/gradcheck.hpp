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

#ifndef DRUGRESP_GRADCHECK_HPP_
#define DRUGRESP_GRADCHECK_HPP_

#include <functional>

#include "drugresp/autodiff.hpp"

namespace drugresp {

// Builds a scalar from `x` on the given tape.
using ScalarFunction = std::function<Variable(Tape&, const Variable& x)>;

// Compares the reverse-mode gradient of f at x against central differences
// (f(x+ε) − f(x−ε)) / 2ε, one coordinate at a time. Returns the largest
// |a − b| / max(|a|, |b|) over all coordinates; coordinates where both values
// are below 1e-9 in magnitude count as exact.
//
// f must be differentiable in an ε-ball around x; functions with a kink
// (relu at 0, a max-pool tie) inside that ball are not meaningful inputs.
double finite_diff_check(const ScalarFunction& f, const Tensor& x, double eps = 1e-5);

// Same check over a set of parameters that f closes over. Each parameter is
// perturbed in place and restored.
double finite_diff_check_params(const std::function<Variable(Tape&)>& f,
                                std::span<Variable> params, double eps = 1e-5);

}  // namespace drugresp

#endif  // DRUGRESP_GRADCHECK_HPP_

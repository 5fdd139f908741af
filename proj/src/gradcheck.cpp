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

#include "drugresp/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace drugresp {

namespace {

// Below this magnitude a central difference is dominated by rounding, so two
// such values count as agreeing.
constexpr double kNegligible = 1e-9;

double relative_error(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale < kNegligible ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace

double finite_diff_check(const ScalarFunction& f, const Tensor& x, double eps) {
  Variable input(x, true);
  std::vector<Variable> params{input};
  return finite_diff_check_params([&](Tape& tape) { return f(tape, input); }, params, eps);
}

double finite_diff_check_params(const std::function<Variable(Tape&)>& f,
                                std::span<Variable> params, double eps) {
  for (auto& p : params) p.zero_grad();
  {
    Tape tape;
    tape.backward(f(tape));
  }
  std::vector<Tensor> analytic;
  analytic.reserve(params.size());
  for (const auto& p : params) analytic.push_back(p.grad());

  auto evaluate = [&f]() {
    Tape tape(false);
    return f(tape).value()[0];
  };

  double worst = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor& value = params[k].mutable_value();
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double original = value[i];
      value[i] = original + eps;
      const double up = evaluate();
      value[i] = original - eps;
      const double down = evaluate();
      value[i] = original;
      const double numeric = (up - down) / (2.0 * eps);
      worst = std::max(worst, relative_error(analytic[k][i], numeric));
    }
  }
  return worst;
}

}  // namespace drugresp

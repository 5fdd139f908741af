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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "drugresp/autodiff.hpp"
#include "drugresp/gradcheck.hpp"
#include "expect_error.hpp"

namespace drugresp {
namespace {

constexpr double kGradTol = 1e-4;

// Uniform entries in ±[0.1, 1], bounded away from relu's kink.
Tensor random_tensor(std::mt19937_64& rng, std::size_t r, std::size_t c) {
  std::uniform_real_distribution<double> mag(0.1, 1.0);
  std::bernoulli_distribution sign(0.5);
  Tensor t(r, c);
  for (auto& v : t.data()) v = sign(rng) ? mag(rng) : -mag(rng);
  return t;
}

// Weights a vector-valued output so the scalar depends on every entry.
Variable weighted_sum(Tape& tape, const Variable& y, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Variable w(random_tensor(rng, y.value().rows(), y.value().cols()));
  return tape.sum(tape.mul(y, w));
}

TEST(Autodiff, ElementwiseExamples) {
  Tape tape;
  EXPECT_EQ(tape.elementwise(Activation::kSigmoid, Variable(Tensor::scalar(0))).value()[0], 0.5);
  const Tensor relu =
      tape.elementwise(Activation::kRelu, Variable(Tensor::row({-1, 2}))).value();
  EXPECT_EQ(relu, Tensor::row({0, 2}));
  EXPECT_EQ(tape.elementwise(Activation::kLog1p, Variable(Tensor::scalar(0))).value()[0], 0.0);
}

TEST(Autodiff, ConcatRowsExamples) {
  Tape tape;
  EXPECT_EQ(tape.concat_rows(Variable(Tensor::row({1, 2})), Variable(Tensor::row({3}))).value(),
            Tensor::row({1, 2, 3}));
  EXPECT_EQ(tape.concat_rows(Variable(Tensor(1, 0)), Variable(Tensor::row({5}))).value(),
            Tensor::row({5}));
  EXPECT_ERROR_KIND(tape.concat_rows(Variable(Tensor(2, 2)), Variable(Tensor::row({5}))),
                    ErrorKind::kShape);
}

TEST(Autodiff, ConcatRowsRoutesGradientBySlot) {
  Variable a(Tensor::row({1, 2}), true);
  Variable b(Tensor::row({3}), true);
  Tape tape;
  Variable y = tape.concat_rows(a, b);
  tape.backward(tape.sum(tape.mul(y, Variable(Tensor::row({10, 20, 30})))));
  EXPECT_EQ(a.grad(), Tensor::row({10, 20}));
  EXPECT_EQ(b.grad(), Tensor::row({30}));
}

TEST(Autodiff, MaxPoolExamples) {
  Tape tape;
  const std::vector<std::uint8_t> both{1, 1}, first{1, 0}, none{0, 0};
  const Variable x(Tensor::from_rows({{1, 5}, {3, 2}}));
  EXPECT_EQ(tape.max_pool_rows(x, both).value(), Tensor::row({3, 5}));
  const Variable y(Tensor::from_rows({{1, 5}, {9, 9}}));
  EXPECT_EQ(tape.max_pool_rows(y, first).value(), Tensor::row({1, 5}));
  EXPECT_ERROR_KIND(tape.max_pool_rows(y, none), ErrorKind::kEmptyPool);
}

TEST(Autodiff, MaxPoolTieSendsGradientToFirstRow) {
  Variable x(Tensor::from_rows({{4, 1}, {4, 2}, {0, 2}}), true);
  const std::vector<std::uint8_t> mask{1, 1, 1};
  Tape tape;
  tape.backward(tape.sum(tape.max_pool_rows(x, mask)));
  EXPECT_EQ(x.grad(), Tensor::from_rows({{1, 0}, {0, 1}, {0, 0}}));

  // Off the tie, finite differences agree with the routed gradient.
  const Tensor untied = Tensor::from_rows({{4.001, 1}, {4, 2.001}, {0, 2}});
  const double err = finite_diff_check(
      [&](Tape& t, const Variable& v) { return t.sum(t.max_pool_rows(v, mask)); }, untied);
  EXPECT_LT(err, kGradTol);
}

TEST(Autodiff, BatchNormTwoRowExample) {
  auto layer = BatchNormLayer::create(1);
  Tape tape;
  const Tensor y = tape.batch_norm(Variable(Tensor::from_rows({{1}, {3}})), layer, Mode::kTrain)
                       .value();
  const double expected = 1.0 / std::sqrt(1.0 + 1e-5);
  EXPECT_NEAR(y[0], -expected, 1e-15);
  EXPECT_NEAR(y[1], expected, 1e-15);
  // Running stats moved by (1 - momentum) towards the batch statistics.
  EXPECT_NEAR(layer.running_mean[0], 0.01 * 2.0, 1e-15);
  EXPECT_NEAR(layer.running_var[0], 0.99 + 0.01 * 1.0, 1e-15);
}

TEST(Autodiff, BatchNormEvalWithUnitStatsIsIdentity) {
  auto layer = BatchNormLayer::create(3);
  std::mt19937_64 rng(3);
  const Tensor x = random_tensor(rng, 4, 3);
  Tape tape;
  const Tensor y = tape.batch_norm(Variable(x), layer, Mode::kEval).value();
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(y[i], x[i] / std::sqrt(1 + 1e-5), 1e-15);
}

TEST(Autodiff, BatchNormRejectsSingleRowInTrainMode) {
  auto layer = BatchNormLayer::create(2);
  Tape tape;
  EXPECT_ERROR_KIND(tape.batch_norm(Variable(Tensor(1, 2)), layer, Mode::kTrain),
                    ErrorKind::kBatchSize);
}

TEST(Autodiff, DropoutIdentityCases) {
  std::mt19937_64 rng(1);
  std::mt19937_64 rng_copy = rng;
  Tape tape;
  const Variable x(Tensor::row({1, 2, 3}));
  EXPECT_EQ(tape.dropout(x, 0.0, Mode::kTrain, rng).value(), x.value());
  EXPECT_EQ(tape.dropout(x, 0.0, Mode::kEval, rng).value(), x.value());
  EXPECT_EQ(tape.dropout(x, 0.5, Mode::kEval, rng).value(), x.value());
  EXPECT_EQ(rng, rng_copy);  // identity paths draw nothing
  EXPECT_ERROR_KIND(tape.dropout(x, 1.0, Mode::kTrain, rng), ErrorKind::kParameter);
  EXPECT_ERROR_KIND(tape.dropout(x, -0.1, Mode::kTrain, rng), ErrorKind::kParameter);
}

TEST(Autodiff, DropoutPreservesExpectationMonteCarlo) {
  const double rate = 0.3;
  const double value = 2.5;
  const std::size_t draws = 100000;
  std::mt19937_64 rng(42);
  Tape tape(false);
  const Tensor out =
      tape.dropout(Variable(Tensor(1, draws, value)), rate, Mode::kTrain, rng).value();
  double mean = 0.0;
  for (double v : out.data()) mean += v;
  mean /= static_cast<double>(draws);
  // Each draw is value/(1-rate) with probability 1-rate, else 0.
  const double sd = value * std::sqrt(rate / (1.0 - rate));
  const double se = sd / std::sqrt(static_cast<double>(draws));
  EXPECT_LT(std::abs(mean - value), 3.0 * se) << "mean " << mean;
}

TEST(Autodiff, LossExamples) {
  Tape tape;
  const Tensor t = Tensor::from_rows({{1}, {2}});
  EXPECT_EQ(tape.loss(Variable(t), t, LossKind::kMse).value()[0], 0.0);
  EXPECT_EQ(tape.loss(Variable(Tensor::scalar(0)), Tensor::scalar(2), LossKind::kMse).value()[0],
            4.0);
  EXPECT_NEAR(tape.loss(Variable(Tensor::scalar(0.5)), Tensor::scalar(1), LossKind::kBce)
                  .value()[0],
              std::log(2.0), 1e-15);
  EXPECT_ERROR_KIND(tape.loss(Variable(Tensor::scalar(1.0)), Tensor::scalar(1), LossKind::kBce),
                    ErrorKind::kDomain);
  EXPECT_ERROR_KIND(tape.loss(Variable(Tensor::scalar(0.5)), Tensor::scalar(2), LossKind::kBce),
                    ErrorKind::kDomain);
}

TEST(Autodiff, SquareDerivativeAtThree) {
  Variable x(Tensor::scalar(3), true);
  Tape tape;
  tape.backward(tape.mul(x, x));
  EXPECT_EQ(x.grad()[0], 6.0);
}

TEST(Autodiff, SecondBackwardWithoutZeroingDoublesLeafGradients) {
  Variable x(Tensor::scalar(3), true);
  Tape tape;
  Variable y = tape.mul(x, x);
  tape.backward(y);
  tape.backward(y);
  EXPECT_EQ(x.grad()[0], 12.0);
  x.zero_grad();
  tape.backward(y);
  EXPECT_EQ(x.grad()[0], 6.0);
}

TEST(Autodiff, BackwardVisitsEachNodeOnce) {
  Variable x(Tensor::row({1, 2}), true);
  Tape tape;
  Variable a = tape.mul(x, x);
  Variable b = tape.add(a, a);  // diamond
  Variable s = tape.sum(b);
  tape.backward(s);
  EXPECT_EQ(tape.last_backward_visits(), tape.size());
  EXPECT_EQ(x.grad(), Tensor::row({4, 8}));
}

TEST(Autodiff, NonScalarLossIsAContractError) {
  Variable x(Tensor::row({1, 2}), true);
  Tape tape;
  EXPECT_ERROR_KIND(tape.backward(tape.mul(x, x)), ErrorKind::kContract);
}

TEST(Autodiff, NonFiniteForwardIsANumericError) {
  Tape tape;
  EXPECT_ERROR_KIND(tape.elementwise(Activation::kLog1p, Variable(Tensor::scalar(-1))),
                    ErrorKind::kNumeric);
}

TEST(Autodiff, EvalTapeRecordsNothing) {
  Variable w(Tensor::row({1, 2}), true);
  Tape tape(false);
  tape.sum(tape.mul(w, w));
  EXPECT_EQ(tape.size(), 0u);
}

TEST(GradCheck, DetectsAMismatchedGradient) {
  std::mt19937_64 rng(6);
  // The recorded pass differentiates sum(x); the probes evaluate sum(x²).
  const double err = finite_diff_check(
      [](Tape& t, const Variable& x) { return t.recording() ? t.sum(x) : t.sum(t.mul(x, x)); },
      random_tensor(rng, 2, 2));
  EXPECT_GT(err, 0.1);
}

TEST(GradCheck, SumIsExact) {
  std::mt19937_64 rng(5);
  const double err =
      finite_diff_check([](Tape& t, const Variable& x) { return t.sum(x); }, random_tensor(rng, 3, 4));
  EXPECT_LT(err, 1e-10);
}

TEST(GradCheck, MatmulSumAtRandom3x3) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    const Variable b(random_tensor(rng, 3, 3));
    const double err = finite_diff_check(
        [&](Tape& t, const Variable& a) { return t.sum(t.matmul(a, b)); },
        random_tensor(rng, 3, 3));
    EXPECT_LT(err, kGradTol) << "seed " << seed;
  }
}

TEST(GradCheck, MlpMseChain) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    Variable w1(random_tensor(rng, 4, 5), true), b1(random_tensor(rng, 1, 5), true);
    Variable w2(random_tensor(rng, 5, 1), true), b2(random_tensor(rng, 1, 1), true);
    const Variable x(random_tensor(rng, 6, 4));
    const Tensor target = random_tensor(rng, 6, 1);
    std::vector<Variable> params{w1, b1, w2, b2};
    const double err = finite_diff_check_params(
        [&](Tape& t) {
          Variable h = t.elementwise(Activation::kRelu, t.add_bias(t.matmul(x, w1), b1));
          return t.loss(t.add_bias(t.matmul(h, w2), b2), target, LossKind::kMse);
        },
        params);
    EXPECT_LT(err, kGradTol) << "seed " << seed;
  }
}

TEST(GradCheck, EveryOperation) {
  using Op = std::function<Variable(Tape&, const Variable&)>;
  struct Case {
    const char* name;
    std::size_t rows, cols;
    Op op;
  };
  const std::vector<std::uint8_t> mask{1, 0, 1, 1};
  const std::vector<std::size_t> index{2, 0, 2, 1};
  std::vector<Case> cases = {
      {"add", 3, 2, [](Tape& t, const Variable& x) { return t.add(x, t.mul(x, x)); }},
      {"mul", 3, 2, [](Tape& t, const Variable& x) { return t.mul(x, x); }},
      {"relu", 3, 2, [](Tape& t, const Variable& x) { return t.elementwise(Activation::kRelu, x); }},
      {"tanh", 3, 2, [](Tape& t, const Variable& x) { return t.elementwise(Activation::kTanh, x); }},
      {"sigmoid", 3, 2,
       [](Tape& t, const Variable& x) { return t.elementwise(Activation::kSigmoid, x); }},
      {"log1p", 3, 2,
       [](Tape& t, const Variable& x) {
         return t.elementwise(Activation::kLog1p, t.mul(x, x));
       }},
      {"matmul", 3, 3, [](Tape& t, const Variable& x) { return t.matmul(x, t.mul(x, x)); }},
      {"add_bias", 3, 2,
       [](Tape& t, const Variable& x) {
         return t.add_bias(x, Variable(Tensor::row({0.3, -0.2})));
       }},
      {"concat_rows", 1, 3, [](Tape& t, const Variable& x) { return t.concat_rows(x, t.mul(x, x)); }},
      {"concat_cols", 3, 2, [](Tape& t, const Variable& x) { return t.concat_cols(t.mul(x, x), x); }},
      {"stack_rows", 1, 3,
       [](Tape& t, const Variable& x) {
         std::vector<Variable> rows{x, t.mul(x, x), x};
         return t.stack_rows(rows);
       }},
      {"gather_rows", 3, 2, [&](Tape& t, const Variable& x) { return t.gather_rows(x, index); }},
      {"max_pool_rows", 4, 3, [&](Tape& t, const Variable& x) { return t.max_pool_rows(x, mask); }},
      {"batch_norm", 4, 3,
       [](Tape& t, const Variable& x) {
         auto layer = BatchNormLayer::create(3);
         layer.scale.mutable_value() = Tensor::row({1.5, 0.5, -1.0});
         layer.shift.mutable_value() = Tensor::row({0.1, 0.2, 0.3});
         return t.batch_norm(x, layer, Mode::kTrain);
       }},
      {"mse", 4, 1,
       [](Tape& t, const Variable& x) {
         return t.loss(x, Tensor::from_rows({{1}, {0}, {-1}, {2}}), LossKind::kMse);
       }},
      {"bce", 4, 1,
       [](Tape& t, const Variable& x) {
         return t.loss(t.elementwise(Activation::kSigmoid, x),
                       Tensor::from_rows({{1}, {0}, {0}, {1}}), LossKind::kBce);
       }},
  };
  for (const auto& c : cases) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      std::mt19937_64 rng(seed * 7919 + 1);
      const Tensor x = random_tensor(rng, c.rows, c.cols);
      const double err = finite_diff_check(
          [&](Tape& t, const Variable& v) { return weighted_sum(t, c.op(t, v), seed); }, x);
      EXPECT_LT(err, kGradTol) << c.name << " seed " << seed;
    }
  }
}

}  // namespace
}  // namespace drugresp

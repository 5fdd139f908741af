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

#ifndef DRUGRESP_AUTODIFF_HPP_
#define DRUGRESP_AUTODIFF_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "drugresp/tensor.hpp"

namespace drugresp {

enum class Mode { kTrain, kEval };
enum class Activation { kRelu, kTanh, kSigmoid, kLog1p };
enum class LossKind { kMse, kBce };

// Shared handle to a value in the computation graph. Copies alias the same
// storage; use clone() for an independent copy.
class Variable {
 public:
  Variable() : Variable(Tensor{}, false) {}
  explicit Variable(Tensor value, bool requires_grad = false);

  const Tensor& value() const { return impl_->value; }
  // Only optimizers and loaders should write through this.
  Tensor& mutable_value() { return impl_->value; }

  bool requires_grad() const { return impl_->requires_grad; }
  bool has_grad() const { return impl_->has_grad; }
  // Zero tensor of the value's shape when no gradient has been accumulated.
  const Tensor& grad() const;
  void zero_grad();
  // Handle semantics: mutates the shared node, not the handle.
  void accumulate_grad(const Tensor& g) const;

  Variable clone() const;
  bool same_node(const Variable& other) const { return impl_ == other.impl_; }

 private:
  friend class Tape;
  struct Impl {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    bool has_grad = false;
  };
  std::shared_ptr<Impl> impl_;
};

// Running statistics plus learnable scale/shift of one batch-norm layer.
struct BatchNormLayer {
  Variable scale;
  Variable shift;
  Tensor running_mean;
  Tensor running_var;
  double momentum = 0.99;
  double epsilon = 1e-5;

  static BatchNormLayer create(std::size_t width, double momentum = 0.99,
                               double epsilon = 1e-5);
};

// Records operations in execution order so that backward() can replay them
// in reverse. Operations are only recorded when recording is enabled and at
// least one input requires a gradient; the output then requires one too.
class Tape {
 public:
  explicit Tape(bool record = true) : record_(record) {}

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Variable matmul(const Variable& a, const Variable& b);
  // x[B×d] + bias[1×d] broadcast over rows.
  Variable add_bias(const Variable& x, const Variable& bias);
  Variable add(const Variable& a, const Variable& b);
  Variable mul(const Variable& a, const Variable& b);
  Variable elementwise(Activation op, const Variable& x);
  Variable sum(const Variable& x);
  // [1×p] ⊕ [1×q] → [1×(p+q)].
  Variable concat_rows(const Variable& a, const Variable& b);
  // [B×p] ⊕ [B×q] → [B×(p+q)], the batched form of concat_rows.
  Variable concat_cols(const Variable& a, const Variable& b);
  // Stacks k single-row variables into [k×d].
  Variable stack_rows(std::span<const Variable> rows);
  // out[i] = table[index[i]]; gradients scatter-add back into the table.
  Variable gather_rows(const Variable& table, std::span<const std::size_t> index);
  // Column-wise max over rows whose mask entry is set. Ties resolve to the
  // lowest row index.
  Variable max_pool_rows(const Variable& x, std::span<const std::uint8_t> mask);
  Variable batch_norm(const Variable& x, BatchNormLayer& layer, Mode mode);
  // Inverted dropout: survivors are scaled by 1/(1-rate) in train mode.
  Variable dropout(const Variable& x, double rate, Mode mode, std::mt19937_64& rng);
  Variable loss(const Variable& pred, const Tensor& target, LossKind kind);

  // Propagates d(loss)/d(·) to every reachable variable that requires a
  // gradient. Leaf gradients accumulate across calls; intermediate ones are
  // recomputed from scratch.
  void backward(const Variable& loss);

  std::size_t size() const noexcept { return nodes_.size(); }
  bool recording() const noexcept { return record_; }
  // Number of node backward rules executed by the last backward() call.
  std::size_t last_backward_visits() const noexcept { return last_visits_; }

 private:
  using BackwardFn = std::function<void(const Tensor& grad_out, const Tensor& out_value)>;
  struct Node {
    std::vector<Variable> inputs;
    Variable output;
    BackwardFn backward;
  };

  Variable emit(Tensor value, std::vector<Variable> inputs, BackwardFn backward,
                const char* op);

  bool record_;
  std::vector<Node> nodes_;
  std::size_t last_visits_ = 0;
};

}  // namespace drugresp

#endif  // DRUGRESP_AUTODIFF_HPP_

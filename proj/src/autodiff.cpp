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

#include "drugresp/autodiff.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "drugresp/error.hpp"

namespace drugresp {

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b)) {
    throw Error(ErrorKind::kShape,
                fmt::format("{}: shape mismatch {} vs {}", op, a.shape_string(), b.shape_string()));
  }
}

void push_grad(const Variable& v, const Tensor& g) {
  if (v.requires_grad()) v.accumulate_grad(g);
}

}  // namespace

Variable::Variable(Tensor value, bool requires_grad) : impl_(std::make_shared<Impl>()) {
  impl_->value = std::move(value);
  impl_->requires_grad = requires_grad;
}

const Tensor& Variable::grad() const {
  if (!impl_->has_grad) {
    impl_->grad = Tensor(impl_->value.rows(), impl_->value.cols());
  }
  return impl_->grad;
}

void Variable::zero_grad() {
  impl_->has_grad = false;
  impl_->grad = Tensor(impl_->value.rows(), impl_->value.cols());
}

void Variable::accumulate_grad(const Tensor& g) const {
  if (!impl_->has_grad) {
    require_same_shape(impl_->value, g, "accumulate_grad");
    impl_->grad = g;
    impl_->has_grad = true;
    return;
  }
  impl_->grad.add_inplace(g);
}

Variable Variable::clone() const {
  Variable copy(impl_->value, impl_->requires_grad);
  copy.impl_->grad = impl_->grad;
  copy.impl_->has_grad = impl_->has_grad;
  return copy;
}

BatchNormLayer BatchNormLayer::create(std::size_t width, double momentum, double epsilon) {
  BatchNormLayer layer;
  layer.scale = Variable(Tensor(1, width, 1.0), true);
  layer.shift = Variable(Tensor(1, width, 0.0), true);
  layer.running_mean = Tensor(1, width, 0.0);
  layer.running_var = Tensor(1, width, 1.0);
  layer.momentum = momentum;
  layer.epsilon = epsilon;
  return layer;
}

Variable Tape::emit(Tensor value, std::vector<Variable> inputs, BackwardFn backward,
                    const char* op) {
  if (!value.all_finite()) {
    throw Error(ErrorKind::kNumeric, fmt::format("{} produced a non-finite value", op));
  }
  const bool needs_grad =
      record_ && std::any_of(inputs.begin(), inputs.end(),
                             [](const Variable& v) { return v.requires_grad(); });
  Variable out(std::move(value), needs_grad);
  if (needs_grad) nodes_.push_back(Node{std::move(inputs), out, std::move(backward)});
  return out;
}

Variable Tape::matmul(const Variable& a, const Variable& b) {
  Tensor out = drugresp::matmul(a.value(), b.value());
  return emit(std::move(out), {a, b},
              [a, b](const Tensor& g, const Tensor&) {
                if (a.requires_grad()) a.accumulate_grad(matmul_bt(g, b.value()));
                if (b.requires_grad()) b.accumulate_grad(matmul_at(a.value(), g));
              },
              "matmul");
}

Variable Tape::add_bias(const Variable& x, const Variable& bias) {
  const Tensor& xv = x.value();
  const Tensor& bv = bias.value();
  if (bv.rows() != 1 || bv.cols() != xv.cols()) {
    throw Error(ErrorKind::kShape, fmt::format("add_bias: bias {} does not fit input {}",
                                               bv.shape_string(), xv.shape_string()));
  }
  Tensor out = xv;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += bv[j];
  }
  return emit(std::move(out), {x, bias},
              [x, bias](const Tensor& g, const Tensor&) {
                push_grad(x, g);
                if (bias.requires_grad()) {
                  Tensor gb(1, g.cols());
                  for (std::size_t i = 0; i < g.rows(); ++i) {
                    for (std::size_t j = 0; j < g.cols(); ++j) gb[j] += g(i, j);
                  }
                  bias.accumulate_grad(gb);
                }
              },
              "add_bias");
}

Variable Tape::add(const Variable& a, const Variable& b) {
  require_same_shape(a.value(), b.value(), "add");
  Tensor out = a.value();
  out.add_inplace(b.value());
  return emit(std::move(out), {a, b},
              [a, b](const Tensor& g, const Tensor&) {
                push_grad(a, g);
                push_grad(b, g);
              },
              "add");
}

Variable Tape::mul(const Variable& a, const Variable& b) {
  require_same_shape(a.value(), b.value(), "mul");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  return emit(std::move(out), {a, b},
              [a, b](const Tensor& g, const Tensor&) {
                if (a.requires_grad()) {
                  Tensor ga = g;
                  for (std::size_t i = 0; i < ga.size(); ++i) ga[i] *= b.value()[i];
                  a.accumulate_grad(ga);
                }
                if (b.requires_grad()) {
                  Tensor gb = g;
                  for (std::size_t i = 0; i < gb.size(); ++i) gb[i] *= a.value()[i];
                  b.accumulate_grad(gb);
                }
              },
              "mul");
}

Variable Tape::elementwise(Activation op, const Variable& x) {
  const Tensor& xv = x.value();
  Tensor out(xv.rows(), xv.cols());
  for (std::size_t i = 0; i < xv.size(); ++i) {
    const double v = xv[i];
    switch (op) {
      case Activation::kRelu: out[i] = v > 0.0 ? v : 0.0; break;
      case Activation::kTanh: out[i] = std::tanh(v); break;
      case Activation::kSigmoid: out[i] = 1.0 / (1.0 + std::exp(-v)); break;
      case Activation::kLog1p: out[i] = std::log1p(v); break;
    }
  }
  return emit(std::move(out), {x},
              [x, op](const Tensor& g, const Tensor& yv) {
                if (!x.requires_grad()) return;
                const Tensor& xv = x.value();
                Tensor gx = g;
                for (std::size_t i = 0; i < gx.size(); ++i) {
                  switch (op) {
                    case Activation::kRelu: gx[i] *= xv[i] > 0.0 ? 1.0 : 0.0; break;
                    case Activation::kTanh: gx[i] *= 1.0 - yv[i] * yv[i]; break;
                    case Activation::kSigmoid: gx[i] *= yv[i] * (1.0 - yv[i]); break;
                    case Activation::kLog1p: gx[i] /= 1.0 + xv[i]; break;
                  }
                }
                x.accumulate_grad(gx);
              },
              "elementwise");
}

Variable Tape::sum(const Variable& x) {
  double total = 0.0;
  for (double v : x.value().data()) total += v;
  const std::size_t r = x.value().rows(), c = x.value().cols();
  return emit(Tensor::scalar(total), {x},
              [x, r, c](const Tensor& g, const Tensor&) {
                if (x.requires_grad()) x.accumulate_grad(Tensor(r, c, g[0]));
              },
              "sum");
}

Variable Tape::concat_rows(const Variable& a, const Variable& b) {
  if (a.value().rows() != 1 || b.value().rows() != 1) {
    throw Error(ErrorKind::kShape,
                fmt::format("concat_rows expects single-row vectors, got {} and {}",
                            a.value().shape_string(), b.value().shape_string()));
  }
  return concat_cols(a, b);
}

Variable Tape::concat_cols(const Variable& a, const Variable& b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.rows() != bv.rows()) {
    throw Error(ErrorKind::kShape, fmt::format("concat: row counts differ, {} and {}",
                                               av.shape_string(), bv.shape_string()));
  }
  const std::size_t p = av.cols(), q = bv.cols();
  Tensor out(av.rows(), p + q);
  for (std::size_t i = 0; i < av.rows(); ++i) {
    std::copy_n(av.row_span(i).begin(), p, out.row_span(i).begin());
    std::copy_n(bv.row_span(i).begin(), q, out.row_span(i).begin() + static_cast<long>(p));
  }
  return emit(std::move(out), {a, b},
              [a, b, p, q](const Tensor& g, const Tensor&) {
                if (a.requires_grad()) {
                  Tensor ga(g.rows(), p);
                  for (std::size_t i = 0; i < g.rows(); ++i) {
                    std::copy_n(g.row_span(i).begin(), p, ga.row_span(i).begin());
                  }
                  a.accumulate_grad(ga);
                }
                if (b.requires_grad()) {
                  Tensor gb(g.rows(), q);
                  for (std::size_t i = 0; i < g.rows(); ++i) {
                    std::copy_n(g.row_span(i).begin() + static_cast<long>(p), q,
                                gb.row_span(i).begin());
                  }
                  b.accumulate_grad(gb);
                }
              },
              "concat");
}

Variable Tape::stack_rows(std::span<const Variable> rows) {
  if (rows.empty()) throw Error(ErrorKind::kShape, "stack_rows: no rows");
  const std::size_t d = rows.front().value().cols();
  Tensor out(rows.size(), d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Tensor& rv = rows[i].value();
    if (rv.rows() != 1 || rv.cols() != d) {
      throw Error(ErrorKind::kShape, fmt::format("stack_rows: row {} has shape {}, expected [1×{}]",
                                                 i, rv.shape_string(), d));
    }
    std::copy_n(rv.data().begin(), d, out.row_span(i).begin());
  }
  std::vector<Variable> inputs(rows.begin(), rows.end());
  return emit(std::move(out), inputs,
              [inputs, d](const Tensor& g, const Tensor&) {
                for (std::size_t i = 0; i < inputs.size(); ++i) {
                  if (!inputs[i].requires_grad()) continue;
                  Tensor gi(1, d);
                  std::copy_n(g.row_span(i).begin(), d, gi.data().begin());
                  inputs[i].accumulate_grad(gi);
                }
              },
              "stack_rows");
}

Variable Tape::gather_rows(const Variable& table, std::span<const std::size_t> index) {
  const Tensor& tv = table.value();
  Tensor out(index.size(), tv.cols());
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] >= tv.rows()) {
      throw Error(ErrorKind::kIndex, fmt::format("gather_rows: index {} out of range for {}",
                                                 index[i], tv.shape_string()));
    }
    std::copy_n(tv.row_span(index[i]).begin(), tv.cols(), out.row_span(i).begin());
  }
  std::vector<std::size_t> idx(index.begin(), index.end());
  return emit(std::move(out), {table},
              [table, idx = std::move(idx)](const Tensor& g, const Tensor&) {
                if (!table.requires_grad()) return;
                Tensor gt(table.value().rows(), table.value().cols());
                for (std::size_t i = 0; i < idx.size(); ++i) {
                  auto dst = gt.row_span(idx[i]);
                  auto src = g.row_span(i);
                  for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
                }
                table.accumulate_grad(gt);
              },
              "gather_rows");
}

Variable Tape::max_pool_rows(const Variable& x, std::span<const std::uint8_t> mask) {
  const Tensor& xv = x.value();
  if (mask.size() != xv.rows()) {
    throw Error(ErrorKind::kShape, fmt::format("max_pool_rows: mask length {} vs input {}",
                                               mask.size(), xv.shape_string()));
  }
  if (std::none_of(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; })) {
    throw Error(ErrorKind::kEmptyPool, "max_pool_rows: every row is masked out");
  }
  const std::size_t d = xv.cols();
  std::vector<std::size_t> argmax(d, xv.rows());
  Tensor out(1, d);
  for (std::size_t r = 0; r < xv.rows(); ++r) {
    if (!mask[r]) continue;
    for (std::size_t j = 0; j < d; ++j) {
      // Strict comparison keeps the first maximal row on ties.
      if (argmax[j] == xv.rows() || xv(r, j) > out[j]) {
        out[j] = xv(r, j);
        argmax[j] = r;
      }
    }
  }
  return emit(std::move(out), {x},
              [x, argmax = std::move(argmax)](const Tensor& g, const Tensor&) {
                if (!x.requires_grad()) return;
                Tensor gx(x.value().rows(), x.value().cols());
                for (std::size_t j = 0; j < argmax.size(); ++j) gx(argmax[j], j) = g[j];
                x.accumulate_grad(gx);
              },
              "max_pool_rows");
}

Variable Tape::batch_norm(const Variable& x, BatchNormLayer& layer, Mode mode) {
  const Tensor& xv = x.value();
  const std::size_t batch = xv.rows(), d = xv.cols();
  if (layer.scale.value().cols() != d || layer.running_mean.cols() != d) {
    throw Error(ErrorKind::kShape, fmt::format("batch_norm: layer width {} vs input {}",
                                               layer.scale.value().cols(), xv.shape_string()));
  }
  if (mode == Mode::kTrain && batch < 2) {
    throw Error(ErrorKind::kBatchSize,
                fmt::format("batch_norm in train mode needs at least 2 rows, got {}", batch));
  }
  Tensor mean(1, d), inv_std(1, d);
  if (mode == Mode::kTrain) {
    for (std::size_t i = 0; i < batch; ++i) {
      for (std::size_t j = 0; j < d; ++j) mean[j] += xv(i, j);
    }
    for (std::size_t j = 0; j < d; ++j) mean[j] /= static_cast<double>(batch);
    Tensor var(1, d);
    for (std::size_t i = 0; i < batch; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        const double c = xv(i, j) - mean[j];
        var[j] += c * c;
      }
    }
    for (std::size_t j = 0; j < d; ++j) {
      var[j] /= static_cast<double>(batch);
      inv_std[j] = 1.0 / std::sqrt(var[j] + layer.epsilon);
      layer.running_mean[j] = layer.momentum * layer.running_mean[j] + (1.0 - layer.momentum) * mean[j];
      layer.running_var[j] = layer.momentum * layer.running_var[j] + (1.0 - layer.momentum) * var[j];
    }
  } else {
    for (std::size_t j = 0; j < d; ++j) {
      mean[j] = layer.running_mean[j];
      inv_std[j] = 1.0 / std::sqrt(layer.running_var[j] + layer.epsilon);
    }
  }

  Tensor xhat(batch, d), out(batch, d);
  const Tensor& scale = layer.scale.value();
  const Tensor& shift = layer.shift.value();
  for (std::size_t i = 0; i < batch; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      xhat(i, j) = (xv(i, j) - mean[j]) * inv_std[j];
      out(i, j) = scale[j] * xhat(i, j) + shift[j];
    }
  }

  Variable scale_v = layer.scale;
  Variable shift_v = layer.shift;
  const bool batch_stats = mode == Mode::kTrain;
  return emit(std::move(out), {x, scale_v, shift_v},
              [x, scale_v, shift_v, xhat = std::move(xhat), inv_std = std::move(inv_std),
               batch_stats](const Tensor& g, const Tensor&) {
                const std::size_t n = g.rows(), w = g.cols();
                const Tensor& gamma = scale_v.value();
                if (scale_v.requires_grad() || shift_v.requires_grad()) {
                  Tensor dscale(1, w), dshift(1, w);
                  for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t j = 0; j < w; ++j) {
                      dscale[j] += g(i, j) * xhat(i, j);
                      dshift[j] += g(i, j);
                    }
                  }
                  push_grad(scale_v, dscale);
                  push_grad(shift_v, dshift);
                }
                if (!x.requires_grad()) return;
                Tensor dx(n, w);
                if (!batch_stats) {
                  for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t j = 0; j < w; ++j) dx(i, j) = g(i, j) * gamma[j] * inv_std[j];
                  }
                } else {
                  const double bn = static_cast<double>(n);
                  for (std::size_t j = 0; j < w; ++j) {
                    double sum_d = 0.0, sum_dx = 0.0;
                    for (std::size_t i = 0; i < n; ++i) {
                      const double dxhat = g(i, j) * gamma[j];
                      sum_d += dxhat;
                      sum_dx += dxhat * xhat(i, j);
                    }
                    for (std::size_t i = 0; i < n; ++i) {
                      const double dxhat = g(i, j) * gamma[j];
                      dx(i, j) = inv_std[j] / bn * (bn * dxhat - sum_d - xhat(i, j) * sum_dx);
                    }
                  }
                }
                x.accumulate_grad(dx);
              },
              "batch_norm");
}

Variable Tape::dropout(const Variable& x, double rate, Mode mode, std::mt19937_64& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw Error(ErrorKind::kParameter, fmt::format("dropout rate {} outside [0,1)", rate));
  }
  if (mode == Mode::kEval || rate == 0.0) return x;
  const double keep_scale = 1.0 / (1.0 - rate);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Tensor mask(x.value().rows(), x.value().cols());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = uniform(rng) < rate ? 0.0 : keep_scale;
  Tensor out = x.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  return emit(std::move(out), {x},
              [x, mask = std::move(mask)](const Tensor& g, const Tensor&) {
                if (!x.requires_grad()) return;
                Tensor gx = g;
                for (std::size_t i = 0; i < gx.size(); ++i) gx[i] *= mask[i];
                x.accumulate_grad(gx);
              },
              "dropout");
}

Variable Tape::loss(const Variable& pred, const Tensor& target, LossKind kind) {
  const Tensor& p = pred.value();
  if (!p.same_shape(target) || p.cols() != 1 || p.rows() == 0) {
    throw Error(ErrorKind::kShape, fmt::format("loss: prediction {} vs target {}",
                                               p.shape_string(), target.shape_string()));
  }
  const std::size_t n = p.rows();
  const double bn = static_cast<double>(n);
  double total = 0.0;
  if (kind == LossKind::kMse) {
    for (std::size_t i = 0; i < n; ++i) {
      const double r = p[i] - target[i];
      total += r * r;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      if (!(p[i] > 0.0 && p[i] < 1.0)) {
        throw Error(ErrorKind::kDomain,
                    fmt::format("bce: prediction {} at row {} is outside (0,1)", p[i], i));
      }
      if (target[i] != 0.0 && target[i] != 1.0) {
        throw Error(ErrorKind::kDomain,
                    fmt::format("bce: target {} at row {} is not 0 or 1", target[i], i));
      }
      total -= target[i] * std::log(p[i]) + (1.0 - target[i]) * std::log(1.0 - p[i]);
    }
  }
  return emit(Tensor::scalar(total / bn), {pred},
              [pred, target, kind, bn](const Tensor& g, const Tensor&) {
                if (!pred.requires_grad()) return;
                const Tensor& pv = pred.value();
                Tensor gp(pv.rows(), 1);
                for (std::size_t i = 0; i < pv.rows(); ++i) {
                  if (kind == LossKind::kMse) {
                    gp[i] = 2.0 * (pv[i] - target[i]) / bn;
                  } else {
                    gp[i] = (pv[i] - target[i]) / (pv[i] * (1.0 - pv[i])) / bn;
                  }
                  gp[i] *= g[0];
                }
                pred.accumulate_grad(gp);
              },
              "loss");
}

void Tape::backward(const Variable& loss) {
  if (loss.value().rows() != 1 || loss.value().cols() != 1) {
    throw Error(ErrorKind::kContract,
                fmt::format("backward needs a scalar loss, got {}", loss.value().shape_string()));
  }
  for (auto& node : nodes_) {
    node.output.impl_->has_grad = false;
    node.output.impl_->grad = Tensor{};
  }
  last_visits_ = 0;
  Variable seed = loss;
  if (seed.requires_grad()) seed.accumulate_grad(Tensor::scalar(1.0));
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    if (!it->output.has_grad()) continue;
    it->backward(it->output.impl_->grad, it->output.impl_->value);
    ++last_visits_;
  }
}

}  // namespace drugresp

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

#include "drugresp/tensor.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "drugresp/error.hpp"

namespace drugresp {

Tensor::Tensor(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Tensor::Tensor(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw Error(ErrorKind::kShape,
                fmt::format("tensor data length {} does not match shape [{}×{}]",
                            data_.size(), rows_, cols_));
  }
}

Tensor Tensor::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) {
      throw Error(ErrorKind::kShape, "ragged initializer for tensor");
    }
    data.insert(data.end(), row.begin(), row.end());
  }
  return Tensor(r, c, std::move(data));
}

Tensor Tensor::row(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor(1, n, std::move(values));
}

void Tensor::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

void Tensor::add_inplace(const Tensor& other) {
  if (!same_shape(other)) {
    throw Error(ErrorKind::kShape, fmt::format("cannot accumulate {} into {}",
                                               other.shape_string(), shape_string()));
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
}

bool Tensor::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

std::string Tensor::shape_string() const { return fmt::format("[{}×{}]", rows_, cols_); }

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorKind::kShape, fmt::format("matmul inner dimensions differ: {} · {}",
                                               a.shape_string(), b.shape_string()));
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  Tensor c(m, n);
  auto cd = c.data();
  auto ad = a.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = cd.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = ad[i * k + p];
      if (aip == 0.0) continue;
      const double* brow = bd.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
  return c;
}

Tensor matmul_bt(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.cols()) {
    throw Error(ErrorKind::kShape, fmt::format("matmul_bt dimensions differ: {} · {}ᵀ",
                                               a.shape_string(), b.shape_string()));
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
  Tensor c(m, n);
  auto ad = a.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = ad.data() + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const double* brow = bd.data() + j * k;
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
      c(i, j) = acc;
    }
  }
  return c;
}

Tensor matmul_at(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows()) {
    throw Error(ErrorKind::kShape, fmt::format("matmul_at dimensions differ: {}ᵀ · {}",
                                               a.shape_string(), b.shape_string()));
  }
  const std::size_t m = a.cols(), k = a.rows(), n = b.cols();
  Tensor c(m, n);
  auto cd = c.data();
  auto ad = a.data();
  auto bd = b.data();
  for (std::size_t p = 0; p < k; ++p) {
    const double* arow = ad.data() + p * m;
    const double* brow = bd.data() + p * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double api = arow[i];
      if (api == 0.0) continue;
      double* crow = cd.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += api * brow[j];
    }
  }
  return c;
}

Tensor transpose(const Tensor& a) {
  Tensor t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  }
  return t;
}

}  // namespace drugresp

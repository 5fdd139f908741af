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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "drugresp/metrics.hpp"
#include "drugresp/omics.hpp"
#include "drugresp/splits.hpp"

namespace drugresp {
namespace {

TEST(Properties, SplitPartitionsExactlyForRandomSpecs) {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<std::size_t> size(2, 3000);
  std::uniform_real_distribution<double> fraction(0.01, 0.99);
  for (int trial = 0; trial < 1000; ++trial) {
    SplitSpec spec;
    spec.test_fraction = fraction(rng);
    spec.seed = rng();
    const std::size_t n = size(rng);
    const double exact = (1.0 - spec.test_fraction) * static_cast<double>(n);
    const auto n_train = static_cast<std::size_t>(std::ceil(exact - 1e-9));
    if (n_train == 0 || n_train >= n) continue;
    if (trial % 2) spec.train_cap = 1 + rng() % n;
    spec.cap_mode = trial % 4 == 1 ? CapMode::kRandom : CapMode::kSlice;
    const auto r = split_dataset(n, spec);
    EXPECT_EQ(r.test.size(), n - n_train);
    EXPECT_EQ(r.train.size() + r.capped_out.size(), n_train);
    if (spec.train_cap) EXPECT_LE(r.train.size(), *spec.train_cap);
    std::vector<std::size_t> all(r.train);
    all.insert(all.end(), r.test.begin(), r.test.end());
    all.insert(all.end(), r.capped_out.begin(), r.capped_out.end());
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> expected(n);
    std::iota(expected.begin(), expected.end(), std::size_t{0});
    ASSERT_EQ(all, expected);
    const auto again = split_dataset(n, spec);
    ASSERT_EQ(again.train, r.train);
    ASSERT_EQ(again.test, r.test);
  }
}

TEST(Properties, LodoFoldsNeverShareDrugs) {
  std::mt19937_64 rng(102);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n_distinct = 2 + rng() % 30;
    std::vector<std::string> drugs;
    for (std::size_t i = 0; i < 200; ++i) drugs.push_back("D" + std::to_string(rng() % n_distinct));
    const std::set<std::string> present(drugs.begin(), drugs.end());
    const std::size_t k = 1 + rng() % present.size();
    const std::uint64_t seed = rng();
    const auto folds = lodo_splits(drugs, k, seed);
    ASSERT_EQ(folds.size(), k);
    for (const auto& f : folds) {
      std::set<std::string> train_drugs, test_drugs;
      for (auto i : f.train) train_drugs.insert(drugs[i]);
      for (auto i : f.test) test_drugs.insert(drugs[i]);
      EXPECT_EQ(test_drugs, std::set<std::string>{f.held_out_drug});
      EXPECT_FALSE(train_drugs.count(f.held_out_drug));
      EXPECT_EQ(f.train.size() + f.test.size(), drugs.size());
    }
    const auto again = lodo_splits(drugs, k, seed);
    for (std::size_t i = 0; i < k; ++i) EXPECT_EQ(again[i].held_out_drug, folds[i].held_out_drug);
  }
}

TEST(Properties, PearsonStaysInsideUnitInterval) {
  std::mt19937_64 rng(103);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng() % 100;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = normal(rng) * 1e3;
      y[i] = trial % 3 ? x[i] * -2.0 + 1.0 : normal(rng);
    }
    const auto r = pearson(x, y);
    ASSERT_TRUE(r.has_value());
    EXPECT_GE(*r, -1.0);
    EXPECT_LE(*r, 1.0);
  }
}

TEST(Properties, CpmOutputIsNonNegativeAndOrderPreserving) {
  std::mt19937_64 rng(104);
  std::uniform_real_distribution<double> value(0.0, 100.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(20);
    for (auto& x : v) x = value(rng);
    const auto out = cpm_log1p(v);
    for (std::size_t i = 0; i < v.size(); ++i) {
      EXPECT_GE(out[i], 0.0);
      for (std::size_t j = 0; j < v.size(); ++j) {
        if (v[i] < v[j]) EXPECT_LE(out[i], out[j]);
      }
    }
  }
}

}  // namespace
}  // namespace drugresp

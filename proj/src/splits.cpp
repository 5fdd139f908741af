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

#include "drugresp/splits.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include <fmt/format.h>

#include "drugresp/error.hpp"
#include "drugresp/seeds.hpp"

namespace drugresp {

std::string_view to_string(CapMode mode) { return mode == CapMode::kSlice ? "slice" : "random"; }

CapMode parse_cap_mode(std::string_view text) {
  if (text == "slice") return CapMode::kSlice;
  if (text == "random") return CapMode::kRandom;
  throw Error(ErrorKind::kConfig, fmt::format("unknown cap mode '{}' (slice|random)", text));
}

void SplitSpec::validate() const {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorKind::kParameter,
                fmt::format("test_fraction {} must lie strictly between 0 and 1", test_fraction));
  }
  if (train_cap && *train_cap == 0) {
    throw Error(ErrorKind::kParameter, "train_cap must be positive");
  }
}

SplitResult split_dataset(std::size_t n_records, const SplitSpec& spec) {
  spec.validate();
  if (n_records < 2) {
    throw Error(ErrorKind::kSplit, fmt::format("cannot split {} records", n_records));
  }
  std::vector<std::size_t> order(n_records);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(derive_seed(spec.seed, "split"));
  std::shuffle(order.begin(), order.end(), rng);

  // The small offset keeps products such as 0.95·100 = 95.00000000000001
  // from rounding up past the intended integer.
  const double exact = (1.0 - spec.test_fraction) * static_cast<double>(n_records);
  const auto n_train = static_cast<std::size_t>(std::ceil(exact - 1e-9));
  if (n_train == 0 || n_train >= n_records) {
    throw Error(ErrorKind::kSplit,
                fmt::format("test_fraction {} leaves an empty side for {} records",
                            spec.test_fraction, n_records));
  }

  SplitResult result;
  result.train.assign(order.begin(), order.begin() + static_cast<long>(n_train));
  result.test.assign(order.begin() + static_cast<long>(n_train), order.end());

  if (spec.train_cap && result.train.size() > *spec.train_cap) {
    const std::size_t cap = *spec.train_cap;
    if (spec.cap_mode == CapMode::kSlice) {
      result.capped_out.assign(result.train.begin() + static_cast<long>(cap), result.train.end());
      result.train.resize(cap);
    } else {
      std::vector<std::size_t> positions(result.train.size());
      std::iota(positions.begin(), positions.end(), std::size_t{0});
      std::mt19937_64 cap_rng(derive_seed(spec.seed, "cap"));
      std::shuffle(positions.begin(), positions.end(), cap_rng);
      std::vector<std::uint8_t> keep(result.train.size(), 0);
      for (std::size_t i = 0; i < cap; ++i) keep[positions[i]] = 1;
      std::vector<std::size_t> kept;
      kept.reserve(cap);
      for (std::size_t i = 0; i < result.train.size(); ++i) {
        (keep[i] ? kept : result.capped_out).push_back(result.train[i]);
      }
      result.train = std::move(kept);
    }
  }
  return result;
}

std::vector<std::string> sample_drugs(std::span<const std::string> record_drugs,
                                      std::size_t n_drugs, std::uint64_t seed) {
  const std::set<std::string> distinct(record_drugs.begin(), record_drugs.end());
  if (n_drugs == 0 || n_drugs > distinct.size()) {
    throw Error(ErrorKind::kParameter,
                fmt::format("requested {} held-out drugs but the data has {} distinct drugs",
                            n_drugs, distinct.size()));
  }
  std::vector<std::string> pool(distinct.begin(), distinct.end());
  std::mt19937_64 rng(derive_seed(seed, "lodo"));
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(n_drugs);
  return pool;
}

std::vector<LodoFold> lodo_folds(std::span<const std::string> record_drugs,
                                 std::span<const std::string> held_out) {
  std::vector<LodoFold> folds;
  folds.reserve(held_out.size());
  for (const auto& drug : held_out) {
    LodoFold fold;
    fold.held_out_drug = drug;
    for (std::size_t i = 0; i < record_drugs.size(); ++i) {
      (record_drugs[i] == drug ? fold.test : fold.train).push_back(i);
    }
    folds.push_back(std::move(fold));
  }
  return folds;
}

std::vector<LodoFold> lodo_splits(std::span<const std::string> record_drugs, std::size_t n_drugs,
                                  std::uint64_t seed) {
  const auto drugs = sample_drugs(record_drugs, n_drugs, seed);
  return lodo_folds(record_drugs, drugs);
}

}  // namespace drugresp

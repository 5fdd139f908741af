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

#ifndef DRUGRESP_SPLITS_HPP_
#define DRUGRESP_SPLITS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace drugresp {

enum class CapMode { kSlice, kRandom };

std::string_view to_string(CapMode mode);
CapMode parse_cap_mode(std::string_view text);

struct SplitSpec {
  double test_fraction = 0.05;
  std::optional<std::size_t> train_cap = 90000;
  CapMode cap_mode = CapMode::kSlice;
  std::uint64_t seed = 0;

  void validate() const;
};

// Indices into the record list. train ∪ test ∪ capped_out covers every
// record exactly once; capped_out holds training records beyond the cap.
struct SplitResult {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::vector<std::size_t> capped_out;
};

// Seeded shuffle, the first ⌈(1−f)·N⌉ records to train and the rest to test,
// then the cap: slice mode keeps the first train_cap training records in
// shuffled order, random mode keeps a seeded subset (original order kept).
SplitResult split_dataset(std::size_t n_records, const SplitSpec& spec);

struct LodoFold {
  std::string held_out_drug;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Samples n_drugs distinct drugs without replacement. Each fold's test side
// is every record of its drug; train is everything else.
std::vector<LodoFold> lodo_splits(std::span<const std::string> record_drugs, std::size_t n_drugs,
                                  std::uint64_t seed);

// The held-out drug draw behind lodo_splits: n_drugs of the sorted distinct
// drugs, shuffled by seed. Throws kParameter when too few drugs exist.
std::vector<std::string> sample_drugs(std::span<const std::string> record_drugs,
                                      std::size_t n_drugs, std::uint64_t seed);

// One fold per listed drug. A drug with no records yields an empty test side.
std::vector<LodoFold> lodo_folds(std::span<const std::string> record_drugs,
                                 std::span<const std::string> held_out);

}  // namespace drugresp

#endif  // DRUGRESP_SPLITS_HPP_

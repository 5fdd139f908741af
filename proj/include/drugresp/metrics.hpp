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

#ifndef DRUGRESP_METRICS_HPP_
#define DRUGRESP_METRICS_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace drugresp {

// Pearson correlation. nullopt when n < 2 or either side has zero variance;
// throws kContract when the lengths differ.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

struct Prediction {
  std::string drug_id;
  std::string cell_line_id;
  std::optional<std::string> cancer_type;
  double predicted = 0.0;
  double observed = 0.0;
};

enum class GroupKind { kCellLine, kCancerType, kDrug };

std::string_view to_string(GroupKind kind);

struct GroupStat {
  std::optional<double> pcc;  // nullopt: undefined
  std::size_t n = 0;
};

// Per-group correlation. Predictions without a cancer type are left out of
// the cancer_type grouping.
std::map<std::string, GroupStat> grouped_pcc(std::span<const Prediction> predictions,
                                             GroupKind group_by);

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_pcc = 0.0;  // NaN when undefined for that epoch

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

// Per-drug held-out correlation from one leave-one-drug-out run.
using LodoScores = std::map<std::string, std::optional<double>>;

struct GainRow {
  std::string drug_id;
  std::size_t rank = 0;  // 1-based
  std::optional<double> gain_a;
  std::optional<double> gain_b;
};

// gain = pcc_model − pcc_baseline per drug. Rows are sorted ascending by
// model A's gain (undefined gains last, ties by drug id) and ranked 1..n.
// model_b may be absent. Throws kComparison when drug sets differ.
std::vector<GainRow> compare_models(const LodoScores& model_a, const LodoScores* model_b,
                                    const LodoScores& baseline);

struct StabilitySummary {
  std::string model;
  std::size_t epochs = 0;
  double max_pcc = 0.0;
  double final_pcc = 0.0;
  // Standard deviation of successive val_pcc differences.
  double fluctuation = 0.0;
};

struct StabilityTable {
  std::vector<std::string> models;
  std::vector<int> epochs;
  // cells[e][m]: nullopt once model m has stopped before epochs[e].
  std::vector<std::vector<std::optional<double>>> cells;
  std::vector<StabilitySummary> summaries;
};

// Merges per-model histories on epoch number. Every history must be a
// contiguous run starting at the same epoch; otherwise throws kMerge.
StabilityTable stability_report(
    const std::vector<std::pair<std::string, std::vector<EpochRecord>>>& histories);

}  // namespace drugresp

#endif  // DRUGRESP_METRICS_HPP_

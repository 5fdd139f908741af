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

#ifndef DRUGRESP_DATASET_HPP_
#define DRUGRESP_DATASET_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "drugresp/molgraph.hpp"
#include "drugresp/omics.hpp"
#include "drugresp/tensor.hpp"

namespace drugresp {

// One (drug, cell line) pair with indices into the owning Dataset.
struct Sample {
  std::size_t drug = 0;
  std::size_t cell = 0;
  double label = 0.0;
  std::optional<std::string> cancer_type;
  std::size_t source_row = 0;  // 0-based index into the response table
};

// Immutable, fully resolved training material.
struct Dataset {
  FeatureSource source = FeatureSource::kScgpt;
  std::vector<std::string> drug_ids;
  std::vector<PaddedGraph> drugs;
  std::vector<std::string> cell_ids;
  Tensor cell_features;  // cells × dim
  std::vector<Sample> samples;

  std::size_t cell_dim() const { return cell_features.cols(); }
};

struct UnmatchedRow {
  std::size_t row = 0;
  std::string drug_id;
  std::string cell_line_id;
  bool missing_drug = false;
  bool missing_cell = false;
};

struct JoinStats {
  std::size_t total = 0;
  std::size_t matched = 0;
  std::size_t missing_drug = 0;
  std::size_t missing_cell = 0;
  std::vector<UnmatchedRow> unmatched;
};

// Keeps only responses whose drug graph and cell features both exist. Every
// other row is listed in `stats`; a row missing both counts toward both.
Dataset join_dataset(const std::vector<ResponseRecord>& responses,
                     const std::vector<MolecularGraph>& drugs, const CellFeatureSet& cells,
                     std::size_t n_max_atoms, bool self_loops, JoinStats* stats = nullptr);

}  // namespace drugresp

#endif  // DRUGRESP_DATASET_HPP_

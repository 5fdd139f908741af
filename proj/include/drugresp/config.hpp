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

#ifndef DRUGRESP_CONFIG_HPP_
#define DRUGRESP_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "drugresp/model.hpp"
#include "drugresp/omics.hpp"
#include "drugresp/splits.hpp"
#include "drugresp/trainer.hpp"

namespace drugresp {

struct RunPaths {
  std::filesystem::path expression;
  std::filesystem::path genes;
  std::filesystem::path embeddings_scgpt;
  std::filesystem::path embeddings_scfoundation;
  std::filesystem::path drug_manifest;
  std::filesystem::path responses;
  std::filesystem::path out = "out";
};

struct LodoOptions {
  std::size_t n_drugs = 20;
  std::vector<FeatureSource> models{FeatureSource::kScgpt, FeatureSource::kScfoundation};
  FeatureSource baseline = FeatureSource::kRawExpression;
  // Share of each fold's training records held back for per-epoch tracking.
  double val_fraction = 0.05;
};

// Everything a command needs. Loaded from a sectioned key = value file:
//
//   [paths]  expression genes embeddings_scgpt embeddings_scfoundation
//            drug_manifest responses out
//   [data]   feature_source
//   [model]  gcn_layer_dims cell_branch_dims head_dims dropout_rate
//            use_batch_norm task n_max_atoms self_loops bn_momentum bn_epsilon
//   [train]  epochs batch_size lr beta1 beta2 adam_epsilon early_stop_patience
//   [split]  test_fraction train_cap cap_mode
//   [run]    seed workers name
//   [lodo]   n_drugs models baseline val_fraction
//   [report] runs
//
// Relative paths resolve against the config file's directory.
struct RunConfig {
  RunPaths paths;
  FeatureSource feature_source = FeatureSource::kScgpt;
  ModelConfig model;
  TrainConfig train;
  SplitSpec split;
  std::uint64_t seed = 0;
  std::size_t workers = 0;  // 0: hardware concurrency
  std::string run_name;     // defaults to the feature source name
  LodoOptions lodo;
  std::vector<std::filesystem::path> report_runs;
  std::filesystem::path base_dir = ".";

  std::string model_name() const;
};

RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir);

// Sets one "section.key" entry; used for file entries and command-line
// overrides alike. Throws kConfig on unknown keys or bad values.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);

// Stable text form of every setting, used for hashing and manifests.
std::string canonical_text(const RunConfig& cfg);

std::size_t effective_workers(const RunConfig& cfg);

}  // namespace drugresp

#endif  // DRUGRESP_CONFIG_HPP_

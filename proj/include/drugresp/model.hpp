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

#ifndef DRUGRESP_MODEL_HPP_
#define DRUGRESP_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "drugresp/autodiff.hpp"
#include "drugresp/molgraph.hpp"

namespace drugresp {

enum class Task { kRegression, kClassification };

std::string_view to_string(Task task);
Task parse_task(std::string_view text);

// Widths and switches of the drug-response network. Defaults are modest
// desk-scale choices; every field is exposed through the run config.
struct ModelConfig {
  std::vector<std::size_t> gcn_layer_dims{256, 128};
  std::vector<std::size_t> cell_branch_dims{128};
  std::vector<std::size_t> head_dims{128, 1};
  double dropout_rate = 0.1;
  bool use_batch_norm = true;
  Task task = Task::kRegression;
  std::size_t n_max_atoms = 100;
  std::size_t cell_input_dim = 512;
  bool self_loops = true;
  double bn_momentum = 0.99;
  double bn_epsilon = 1e-5;

  // Throws kParameter on an unusable config.
  void validate() const;
  std::size_t drug_embedding_dim() const { return gcn_layer_dims.back(); }
  std::size_t cell_embedding_dim() const {
    return cell_branch_dims.empty() ? cell_input_dim : cell_branch_dims.back();
  }

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct DenseLayer {
  Variable weight;  // fan_in × fan_out
  Variable bias;    // 1 × fan_out; empty when a batch-norm shift follows
  bool has_bias() const { return bias.value().size() != 0; }
};

struct ModelParams {
  std::vector<DenseLayer> gcn;
  std::vector<DenseLayer> cell;
  std::vector<DenseLayer> head;
  // One per hidden layer of the cell branch and head when batch norm is on.
  std::vector<BatchNormLayer> cell_norm;
  std::vector<BatchNormLayer> head_norm;

  // Handles (aliases) of every learnable tensor in a fixed order.
  std::vector<Variable> trainable() const;
  // Deep copy; the result shares no storage with *this.
  ModelParams clone() const;
  void zero_grad();
};

// Glorot-uniform weights, zero biases, unit batch-norm scale and zero shift.
// Layers followed by batch norm carry no bias. Deterministic per seed.
ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed);

// H₀ = atom features; H_{l+1} = relu(Â·H_l·W_l + b_l); max-pool over real
// atoms. Returns [1 × gcn_layer_dims.back()].
Variable encode_drug(Tape& tape, const PaddedGraph& graph, const ModelParams& params,
                     const ModelConfig& cfg, Mode mode);

// cells: [B × cell_input_dim]. Linear → batch-norm → relu → dropout per layer.
Variable encode_cell(Tape& tape, const Variable& cells, ModelParams& params,
                     const ModelConfig& cfg, Mode mode, std::mt19937_64& rng);

// Head MLP over drug ⊕ cell embeddings. Returns [B × 1]; sigmoid applied for
// classification.
Variable predict(Tape& tape, const Variable& drug_embedding, const Variable& cell_embedding,
                 ModelParams& params, const ModelConfig& cfg, Mode mode, std::mt19937_64& rng);

// Full forward pass for a batch. graphs[i] pairs with row i of `cells`;
// repeated graph pointers are encoded once and gathered.
Variable forward_batch(Tape& tape, std::span<const PaddedGraph* const> graphs, const Tensor& cells,
                       ModelParams& params, const ModelConfig& cfg, Mode mode,
                       std::mt19937_64& rng);

// Text checkpoint: a version line, the config, then every tensor with a shape
// header. Values are written as hex floats so a reload is bit-exact.
inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  ModelConfig config;
  ModelParams params;
};

void save_checkpoint(const std::filesystem::path& path, const ModelConfig& cfg,
                     const ModelParams& params);
// Throws kCheckpoint on a version mismatch or malformed content.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace drugresp

#endif  // DRUGRESP_MODEL_HPP_

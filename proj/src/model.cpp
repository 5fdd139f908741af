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

#include "drugresp/model.hpp"

#include <cmath>
#include <map>

#include <fmt/format.h>

#include "drugresp/error.hpp"

namespace drugresp {

std::string_view to_string(Task task) {
  return task == Task::kRegression ? "regression" : "classification";
}

Task parse_task(std::string_view text) {
  if (text == "regression") return Task::kRegression;
  if (text == "classification") return Task::kClassification;
  throw Error(ErrorKind::kConfig,
              fmt::format("unknown task '{}' (regression|classification)", text));
}

void ModelConfig::validate() const {
  auto all_positive = [](const std::vector<std::size_t>& dims) {
    for (auto d : dims) {
      if (d == 0) return false;
    }
    return true;
  };
  if (gcn_layer_dims.empty() || !all_positive(gcn_layer_dims)) {
    throw Error(ErrorKind::kParameter, "gcn_layer_dims must be a non-empty list of positive ints");
  }
  if (!all_positive(cell_branch_dims)) {
    throw Error(ErrorKind::kParameter, "cell_branch_dims must be positive");
  }
  if (head_dims.empty() || !all_positive(head_dims) || head_dims.back() != 1) {
    throw Error(ErrorKind::kParameter, "head_dims must be positive and end in 1");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw Error(ErrorKind::kParameter, fmt::format("dropout_rate {} outside [0,1)", dropout_rate));
  }
  if (n_max_atoms == 0 || cell_input_dim == 0) {
    throw Error(ErrorKind::kParameter, "n_max_atoms and cell_input_dim must be positive");
  }
  if (!(bn_momentum >= 0.0 && bn_momentum < 1.0) || !(bn_epsilon > 0.0)) {
    throw Error(ErrorKind::kParameter, "batch-norm momentum must be in [0,1), epsilon > 0");
  }
}

std::vector<Variable> ModelParams::trainable() const {
  std::vector<Variable> out;
  for (const auto* group : {&gcn, &cell, &head}) {
    for (const auto& layer : *group) {
      out.push_back(layer.weight);
      if (layer.has_bias()) out.push_back(layer.bias);
    }
  }
  for (const auto* group : {&cell_norm, &head_norm}) {
    for (const auto& bn : *group) {
      out.push_back(bn.scale);
      out.push_back(bn.shift);
    }
  }
  return out;
}

ModelParams ModelParams::clone() const {
  ModelParams copy;
  auto copy_dense = [](const std::vector<DenseLayer>& src, std::vector<DenseLayer>& dst) {
    for (const auto& l : src) dst.push_back(DenseLayer{l.weight.clone(), l.bias.clone()});
  };
  auto copy_norm = [](const std::vector<BatchNormLayer>& src, std::vector<BatchNormLayer>& dst) {
    for (const auto& bn : src) {
      BatchNormLayer c = bn;
      c.scale = bn.scale.clone();
      c.shift = bn.shift.clone();
      dst.push_back(std::move(c));
    }
  };
  copy_dense(gcn, copy.gcn);
  copy_dense(cell, copy.cell);
  copy_dense(head, copy.head);
  copy_norm(cell_norm, copy.cell_norm);
  copy_norm(head_norm, copy.head_norm);
  return copy;
}

void ModelParams::zero_grad() {
  for (auto& v : trainable()) v.zero_grad();
}

ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  auto dense = [&rng](std::size_t fan_in, std::size_t fan_out, bool with_bias = true) {
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Tensor w(fan_in, fan_out);
    for (auto& v : w.data()) v = dist(rng);
    return DenseLayer{Variable(std::move(w), true),
                      Variable(with_bias ? Tensor(1, fan_out) : Tensor(), with_bias)};
  };

  ModelParams params;
  std::size_t in = kAtomFeatureWidth;
  for (auto out : cfg.gcn_layer_dims) {
    params.gcn.push_back(dense(in, out));
    in = out;
  }
  in = cfg.cell_input_dim;
  for (auto out : cfg.cell_branch_dims) {
    params.cell.push_back(dense(in, out, !cfg.use_batch_norm));
    if (cfg.use_batch_norm) {
      params.cell_norm.push_back(BatchNormLayer::create(out, cfg.bn_momentum, cfg.bn_epsilon));
    }
    in = out;
  }
  in = cfg.drug_embedding_dim() + cfg.cell_embedding_dim();
  for (std::size_t i = 0; i < cfg.head_dims.size(); ++i) {
    const std::size_t out = cfg.head_dims[i];
    const bool normed = cfg.use_batch_norm && i + 1 < cfg.head_dims.size();
    params.head.push_back(dense(in, out, !normed));
    if (normed) {
      params.head_norm.push_back(BatchNormLayer::create(out, cfg.bn_momentum, cfg.bn_epsilon));
    }
    in = out;
  }
  return params;
}

namespace {

// relu(Â·H·W + b), associating the product so the n×n multiply runs on the
// narrower side.
Variable graph_conv(Tape& tape, const Variable& adjacency, const Variable& h,
                    const DenseLayer& layer) {
  const std::size_t in = layer.weight.value().rows();
  const std::size_t out = layer.weight.value().cols();
  Variable z = in <= out ? tape.matmul(tape.matmul(adjacency, h), layer.weight)
                         : tape.matmul(adjacency, tape.matmul(h, layer.weight));
  return tape.elementwise(Activation::kRelu, tape.add_bias(z, layer.bias));
}

Variable hidden_layer(Tape& tape, const Variable& x, const DenseLayer& layer,
                      BatchNormLayer* norm, double dropout_rate, Mode mode,
                      std::mt19937_64& rng) {
  Variable h = tape.matmul(x, layer.weight);
  if (layer.has_bias()) h = tape.add_bias(h, layer.bias);
  if (norm) h = tape.batch_norm(h, *norm, mode);
  h = tape.elementwise(Activation::kRelu, h);
  return tape.dropout(h, dropout_rate, mode, rng);
}

}  // namespace

Variable encode_drug(Tape& tape, const PaddedGraph& graph, const ModelParams& params,
                     const ModelConfig& cfg, Mode /*mode*/) {
  if (graph.capacity() != cfg.n_max_atoms || graph.features.cols() != kAtomFeatureWidth ||
      graph.features.rows() != cfg.n_max_atoms) {
    throw Error(ErrorKind::kShape,
                fmt::format("encode_drug: graph padded to {} atoms with features {}, config "
                            "expects {} atoms × {}", graph.capacity(),
                            graph.features.shape_string(), cfg.n_max_atoms, kAtomFeatureWidth));
  }
  if (params.gcn.size() != cfg.gcn_layer_dims.size()) {
    throw Error(ErrorKind::kShape, "encode_drug: parameters do not match gcn_layer_dims");
  }
  // Padding rows have zero adjacency, so they never feed real atoms and the
  // mask keeps them out of the pool. Evaluating only the leading real block
  // is therefore exact.
  const std::size_t n = graph.atom_count;
  Tensor features(n, kAtomFeatureWidth);
  Tensor adjacency(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(graph.features.row_span(i).begin(), kAtomFeatureWidth,
                features.row_span(i).begin());
    std::copy_n(graph.norm_adjacency.row_span(i).begin(), n, adjacency.row_span(i).begin());
  }
  const Variable adj(std::move(adjacency));
  Variable h(std::move(features));
  for (const auto& layer : params.gcn) h = graph_conv(tape, adj, h, layer);
  return tape.max_pool_rows(h, std::span(graph.mask).first(n));
}

Variable encode_cell(Tape& tape, const Variable& cells, ModelParams& params,
                     const ModelConfig& cfg, Mode mode, std::mt19937_64& rng) {
  if (cells.value().cols() != cfg.cell_input_dim) {
    throw Error(ErrorKind::kShape,
                fmt::format("encode_cell: input is {} but the model expects {} features",
                            cells.value().shape_string(), cfg.cell_input_dim));
  }
  Variable h = cells;
  for (std::size_t i = 0; i < params.cell.size(); ++i) {
    BatchNormLayer* norm = cfg.use_batch_norm ? &params.cell_norm.at(i) : nullptr;
    h = hidden_layer(tape, h, params.cell[i], norm, cfg.dropout_rate, mode, rng);
  }
  return h;
}

Variable predict(Tape& tape, const Variable& drug_embedding, const Variable& cell_embedding,
                 ModelParams& params, const ModelConfig& cfg, Mode mode, std::mt19937_64& rng) {
  Variable h = drug_embedding.value().rows() == 1 && cell_embedding.value().rows() == 1
                   ? tape.concat_rows(drug_embedding, cell_embedding)
                   : tape.concat_cols(drug_embedding, cell_embedding);
  const std::size_t last = params.head.size() - 1;
  for (std::size_t i = 0; i < last; ++i) {
    BatchNormLayer* norm = cfg.use_batch_norm ? &params.head_norm.at(i) : nullptr;
    h = hidden_layer(tape, h, params.head[i], norm, cfg.dropout_rate, mode, rng);
  }
  h = tape.add_bias(tape.matmul(h, params.head[last].weight), params.head[last].bias);
  if (cfg.task == Task::kClassification) h = tape.elementwise(Activation::kSigmoid, h);
  return h;
}

Variable forward_batch(Tape& tape, std::span<const PaddedGraph* const> graphs, const Tensor& cells,
                       ModelParams& params, const ModelConfig& cfg, Mode mode,
                       std::mt19937_64& rng) {
  if (graphs.size() != cells.rows()) {
    throw Error(ErrorKind::kShape, fmt::format("forward_batch: {} graphs for {} cell rows",
                                               graphs.size(), cells.rows()));
  }
  std::map<const PaddedGraph*, std::size_t> slot;
  std::vector<Variable> encoded;
  std::vector<std::size_t> index;
  index.reserve(graphs.size());
  for (const PaddedGraph* g : graphs) {
    auto [it, inserted] = slot.emplace(g, encoded.size());
    if (inserted) encoded.push_back(encode_drug(tape, *g, params, cfg, mode));
    index.push_back(it->second);
  }
  Variable drug_table = tape.stack_rows(encoded);
  Variable drug_embedding = tape.gather_rows(drug_table, index);
  Variable cell_embedding = encode_cell(tape, Variable(cells), params, cfg, mode, rng);
  return predict(tape, drug_embedding, cell_embedding, params, cfg, mode, rng);
}

}  // namespace drugresp

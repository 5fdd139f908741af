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

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "drugresp/error.hpp"
#include "drugresp/model.hpp"

namespace drugresp {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kMagic = "drugresp-checkpoint";

std::string join_dims(const std::vector<std::size_t>& dims) {
  return dims.empty() ? "-" : fmt::format("{}", fmt::join(dims, ","));
}

std::vector<std::size_t> parse_dims(const std::string& text) {
  std::vector<std::size_t> dims;
  if (text == "-") return dims;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) dims.push_back(std::stoul(item));
  return dims;
}

std::string hex(double v) { return fmt::format("{:a}", v); }

double parse_hex(const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0') {
    throw Error(ErrorKind::kCheckpoint, fmt::format("checkpoint: bad number '{}'", text));
  }
  return v;
}

// Named references to every tensor, in the order they are written.
std::vector<std::pair<std::string, Tensor*>> tensor_slots(ModelParams& p) {
  std::vector<std::pair<std::string, Tensor*>> slots;
  auto dense = [&slots](const char* group, std::vector<DenseLayer>& layers) {
    for (std::size_t i = 0; i < layers.size(); ++i) {
      slots.emplace_back(fmt::format("{}.{}.weight", group, i), &layers[i].weight.mutable_value());
      if (layers[i].has_bias()) {
        slots.emplace_back(fmt::format("{}.{}.bias", group, i), &layers[i].bias.mutable_value());
      }
    }
  };
  auto norm = [&slots](const char* group, std::vector<BatchNormLayer>& layers) {
    for (std::size_t i = 0; i < layers.size(); ++i) {
      slots.emplace_back(fmt::format("{}.{}.scale", group, i), &layers[i].scale.mutable_value());
      slots.emplace_back(fmt::format("{}.{}.shift", group, i), &layers[i].shift.mutable_value());
      slots.emplace_back(fmt::format("{}.{}.running_mean", group, i), &layers[i].running_mean);
      slots.emplace_back(fmt::format("{}.{}.running_var", group, i), &layers[i].running_var);
    }
  };
  dense("gcn", p.gcn);
  dense("cell", p.cell);
  dense("head", p.head);
  norm("cell_norm", p.cell_norm);
  norm("head_norm", p.head_norm);
  return slots;
}

}  // namespace

void save_checkpoint(const fs::path& path, const ModelConfig& cfg, const ModelParams& params) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, fmt::format("cannot write {}", path.string()));
  out << kMagic << ' ' << kCheckpointVersion << '\n';
  out << "task " << to_string(cfg.task) << '\n';
  out << "gcn_layer_dims " << join_dims(cfg.gcn_layer_dims) << '\n';
  out << "cell_branch_dims " << join_dims(cfg.cell_branch_dims) << '\n';
  out << "head_dims " << join_dims(cfg.head_dims) << '\n';
  out << "dropout_rate " << hex(cfg.dropout_rate) << '\n';
  out << "use_batch_norm " << (cfg.use_batch_norm ? 1 : 0) << '\n';
  out << "n_max_atoms " << cfg.n_max_atoms << '\n';
  out << "cell_input_dim " << cfg.cell_input_dim << '\n';
  out << "self_loops " << (cfg.self_loops ? 1 : 0) << '\n';
  out << "bn_momentum " << hex(cfg.bn_momentum) << '\n';
  out << "bn_epsilon " << hex(cfg.bn_epsilon) << '\n';

  ModelParams copy = params.clone();
  for (const auto& [name, tensor] : tensor_slots(copy)) {
    out << "tensor " << name << ' ' << tensor->rows() << ' ' << tensor->cols() << '\n';
    for (std::size_t r = 0; r < tensor->rows(); ++r) {
      const auto row = tensor->row_span(r);
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) out << ' ';
        out << hex(row[c]);
      }
      out << '\n';
    }
  }
  out << "end\n";
  if (!out) throw Error(ErrorKind::kIo, fmt::format("failed writing {}", path.string()));
}

Checkpoint load_checkpoint(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, fmt::format("cannot open checkpoint {}", path.string()));

  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != kMagic) {
    throw Error(ErrorKind::kCheckpoint, fmt::format("{} is not a checkpoint", path.string()));
  }
  if (version != kCheckpointVersion) {
    throw Error(ErrorKind::kCheckpoint,
                fmt::format("{}: checkpoint version {} is not supported (expected {})",
                            path.string(), version, kCheckpointVersion));
  }

  auto expect_key = [&](std::string_view key) {
    std::string got, value;
    in >> got >> value;
    if (got != key) {
      throw Error(ErrorKind::kCheckpoint,
                  fmt::format("{}: expected '{}', found '{}'", path.string(), key, got));
    }
    return value;
  };

  Checkpoint ckpt;
  ModelConfig& cfg = ckpt.config;
  try {
    cfg.task = parse_task(expect_key("task"));
    cfg.gcn_layer_dims = parse_dims(expect_key("gcn_layer_dims"));
    cfg.cell_branch_dims = parse_dims(expect_key("cell_branch_dims"));
    cfg.head_dims = parse_dims(expect_key("head_dims"));
    cfg.dropout_rate = parse_hex(expect_key("dropout_rate"));
    cfg.use_batch_norm = expect_key("use_batch_norm") == "1";
    cfg.n_max_atoms = std::stoul(expect_key("n_max_atoms"));
    cfg.cell_input_dim = std::stoul(expect_key("cell_input_dim"));
    cfg.self_loops = expect_key("self_loops") == "1";
    cfg.bn_momentum = parse_hex(expect_key("bn_momentum"));
    cfg.bn_epsilon = parse_hex(expect_key("bn_epsilon"));
    cfg.validate();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kCheckpoint) throw;
    throw Error(ErrorKind::kCheckpoint, fmt::format("{}: {}", path.string(), e.what()));
  } catch (const std::exception& e) {
    throw Error(ErrorKind::kCheckpoint,
                fmt::format("{}: malformed config ({})", path.string(), e.what()));
  }

  ckpt.params = init_params(cfg, 0);
  for (const auto& [name, tensor] : tensor_slots(ckpt.params)) {
    std::string tag, got_name;
    std::size_t rows = 0, cols = 0;
    in >> tag >> got_name >> rows >> cols;
    if (tag != "tensor" || got_name != name || rows != tensor->rows() || cols != tensor->cols()) {
      throw Error(ErrorKind::kCheckpoint,
                  fmt::format("{}: expected tensor {} {}, found '{} {}' [{}×{}]", path.string(),
                              name, tensor->shape_string(), tag, got_name, rows, cols));
    }
    for (auto& v : tensor->data()) {
      std::string token;
      if (!(in >> token)) {
        throw Error(ErrorKind::kCheckpoint,
                    fmt::format("{}: truncated tensor {}", path.string(), name));
      }
      v = parse_hex(token);
    }
  }
  std::string tail;
  in >> tail;
  if (tail != "end") {
    throw Error(ErrorKind::kCheckpoint, fmt::format("{}: trailing content", path.string()));
  }
  return ckpt;
}

}  // namespace drugresp

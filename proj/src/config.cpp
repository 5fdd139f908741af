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

#include "drugresp/config.hpp"

#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "csv.hpp"
#include "drugresp/error.hpp"

namespace drugresp {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view want) {
  throw Error(ErrorKind::kConfig,
              fmt::format("config key {}: '{}' is not {}", key, value, want));
}

std::size_t to_count(std::string_view key, std::string_view value) {
  const auto v = csv::to_integer(value);
  if (!v || *v < 0) bad_value(key, value, "a non-negative integer");
  return static_cast<std::size_t>(*v);
}

double to_real(std::string_view key, std::string_view value) {
  const auto v = csv::to_double(value);
  if (!v) bad_value(key, value, "a number");
  return *v;
}

bool to_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, value, "a boolean");
}

std::vector<std::string_view> to_list(std::string_view value) {
  std::vector<std::string_view> items;
  if (csv::trim(value).empty() || value == "-") return items;
  for (auto item : csv::split(value, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

std::vector<std::size_t> to_dims(std::string_view key, std::string_view value) {
  std::vector<std::size_t> dims;
  for (auto item : to_list(value)) dims.push_back(to_count(key, item));
  return dims;
}

std::string dims_text(const std::vector<std::size_t>& dims) {
  return dims.empty() ? "-" : fmt::format("{}", fmt::join(dims, ","));
}

}  // namespace

std::string RunConfig::model_name() const {
  return run_name.empty() ? std::string(to_string(feature_source)) : run_name;
}

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view raw_value) {
  const std::string_view value = csv::trim(raw_value);
  auto path = [&cfg, value]() {
    fs::path p{std::string(value)};
    return p.empty() || p.is_absolute() ? p : cfg.base_dir / p;
  };

  if (key == "paths.expression") cfg.paths.expression = path();
  else if (key == "paths.genes") cfg.paths.genes = path();
  else if (key == "paths.embeddings_scgpt") cfg.paths.embeddings_scgpt = path();
  else if (key == "paths.embeddings_scfoundation") cfg.paths.embeddings_scfoundation = path();
  else if (key == "paths.drug_manifest") cfg.paths.drug_manifest = path();
  else if (key == "paths.responses") cfg.paths.responses = path();
  else if (key == "paths.out") cfg.paths.out = path();
  else if (key == "data.feature_source") cfg.feature_source = parse_feature_source(value);
  else if (key == "model.gcn_layer_dims") cfg.model.gcn_layer_dims = to_dims(key, value);
  else if (key == "model.cell_branch_dims") cfg.model.cell_branch_dims = to_dims(key, value);
  else if (key == "model.head_dims") cfg.model.head_dims = to_dims(key, value);
  else if (key == "model.dropout_rate") cfg.model.dropout_rate = to_real(key, value);
  else if (key == "model.use_batch_norm") cfg.model.use_batch_norm = to_bool(key, value);
  else if (key == "model.task") cfg.model.task = parse_task(value);
  else if (key == "model.n_max_atoms") cfg.model.n_max_atoms = to_count(key, value);
  else if (key == "model.self_loops") cfg.model.self_loops = to_bool(key, value);
  else if (key == "model.bn_momentum") cfg.model.bn_momentum = to_real(key, value);
  else if (key == "model.bn_epsilon") cfg.model.bn_epsilon = to_real(key, value);
  else if (key == "train.epochs") cfg.train.epochs = to_count(key, value);
  else if (key == "train.batch_size") cfg.train.batch_size = to_count(key, value);
  else if (key == "train.lr") cfg.train.adam.lr = to_real(key, value);
  else if (key == "train.beta1") cfg.train.adam.beta1 = to_real(key, value);
  else if (key == "train.beta2") cfg.train.adam.beta2 = to_real(key, value);
  else if (key == "train.adam_epsilon") cfg.train.adam.epsilon = to_real(key, value);
  else if (key == "train.early_stop_patience") {
    if (value == "none" || value == "off" || value == "0") {
      cfg.train.early_stop_patience.reset();
    } else {
      cfg.train.early_stop_patience = to_count(key, value);
    }
  }
  else if (key == "split.test_fraction") cfg.split.test_fraction = to_real(key, value);
  else if (key == "split.train_cap") {
    if (value == "none" || value == "off") {
      cfg.split.train_cap.reset();
    } else {
      cfg.split.train_cap = to_count(key, value);
    }
  }
  else if (key == "split.cap_mode") cfg.split.cap_mode = parse_cap_mode(value);
  else if (key == "run.seed") {
    const auto v = csv::to_integer(value);
    if (!v || *v < 0) bad_value(key, value, "a non-negative integer");
    cfg.seed = static_cast<std::uint64_t>(*v);
  }
  else if (key == "run.workers") cfg.workers = to_count(key, value);
  else if (key == "run.name") cfg.run_name = std::string(value);
  else if (key == "lodo.n_drugs") cfg.lodo.n_drugs = to_count(key, value);
  else if (key == "lodo.models") {
    cfg.lodo.models.clear();
    for (auto item : to_list(value)) cfg.lodo.models.push_back(parse_feature_source(item));
  }
  else if (key == "lodo.baseline") cfg.lodo.baseline = parse_feature_source(value);
  else if (key == "lodo.val_fraction") cfg.lodo.val_fraction = to_real(key, value);
  else if (key == "report.runs") {
    cfg.report_runs.clear();
    for (auto item : to_list(value)) {
      fs::path p{std::string(item)};
      cfg.report_runs.push_back(p.is_absolute() ? p : cfg.base_dir / p);
    }
  }
  else {
    throw Error(ErrorKind::kConfig, fmt::format("unknown config key '{}'", key));
  }
}

RunConfig parse_run_config(std::string_view text, const fs::path& base_dir) {
  // Boost's INI reader only knows ';' comments; drop '#' lines as well.
  std::stringstream filtered;
  std::stringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const auto t = csv::trim(line);
    if (!t.empty() && t.front() == '#') continue;
    filtered << line << '\n';
  }

  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(filtered, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorKind::kConfig, fmt::format("config: {}", e.what()));
  }

  RunConfig cfg;
  cfg.base_dir = base_dir;
  for (const auto& [section, entries] : tree) {
    if (entries.empty() && !entries.data().empty()) {
      throw Error(ErrorKind::kConfig,
                  fmt::format("config: key '{}' must live inside a [section]", section));
    }
    for (const auto& [key, node] : entries) {
      apply_setting(cfg, fmt::format("{}.{}", section, key), node.get_value<std::string>());
    }
  }
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kConfig, fmt::format("cannot read config {}", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  return parse_run_config(ss.str(), base);
}

std::string canonical_text(const RunConfig& cfg) {
  std::string out;
  auto put = [&out](std::string_view key, const std::string& value) {
    out += fmt::format("{}={}\n", key, value);
  };
  auto real = [](double v) { return csv::format_double(v); };
  put("data.feature_source", std::string(to_string(cfg.feature_source)));
  put("lodo.baseline", std::string(to_string(cfg.lodo.baseline)));
  {
    std::vector<std::string> names;
    for (auto m : cfg.lodo.models) names.emplace_back(to_string(m));
    put("lodo.models", fmt::format("{}", fmt::join(names, ",")));
  }
  put("lodo.n_drugs", std::to_string(cfg.lodo.n_drugs));
  put("lodo.val_fraction", real(cfg.lodo.val_fraction));
  put("model.bn_epsilon", real(cfg.model.bn_epsilon));
  put("model.bn_momentum", real(cfg.model.bn_momentum));
  put("model.cell_branch_dims", dims_text(cfg.model.cell_branch_dims));
  put("model.dropout_rate", real(cfg.model.dropout_rate));
  put("model.gcn_layer_dims", dims_text(cfg.model.gcn_layer_dims));
  put("model.head_dims", dims_text(cfg.model.head_dims));
  put("model.n_max_atoms", std::to_string(cfg.model.n_max_atoms));
  put("model.self_loops", cfg.model.self_loops ? "true" : "false");
  put("model.task", std::string(to_string(cfg.model.task)));
  put("model.use_batch_norm", cfg.model.use_batch_norm ? "true" : "false");
  put("run.name", cfg.model_name());
  put("run.seed", std::to_string(cfg.seed));
  put("split.cap_mode", std::string(to_string(cfg.split.cap_mode)));
  put("split.test_fraction", real(cfg.split.test_fraction));
  put("split.train_cap", cfg.split.train_cap ? std::to_string(*cfg.split.train_cap) : "none");
  put("train.adam_epsilon", real(cfg.train.adam.epsilon));
  put("train.batch_size", std::to_string(cfg.train.batch_size));
  put("train.beta1", real(cfg.train.adam.beta1));
  put("train.beta2", real(cfg.train.adam.beta2));
  put("train.early_stop_patience",
      cfg.train.early_stop_patience ? std::to_string(*cfg.train.early_stop_patience) : "none");
  put("train.epochs", std::to_string(cfg.train.epochs));
  put("train.lr", real(cfg.train.adam.lr));
  return out;
}

std::size_t effective_workers(const RunConfig& cfg) {
  if (cfg.workers > 0) return cfg.workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace drugresp

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

#include "drugresp/molgraph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "csv.hpp"
#include "drugresp/error.hpp"

namespace drugresp {

namespace fs = std::filesystem;

MolecularGraph make_graph(std::string drug_id, Tensor features,
                          std::vector<std::pair<std::size_t, std::size_t>> bonds,
                          std::vector<std::size_t> degrees) {
  const std::size_t n = features.rows();
  if (n == 0) throw Error(ErrorKind::kFormat, fmt::format("drug {}: graph has no atoms", drug_id));
  if (features.cols() != kAtomFeatureWidth) {
    throw Error(ErrorKind::kFormat, fmt::format("drug {}: atom features are {} wide, expected {}",
                                                drug_id, features.cols(), kAtomFeatureWidth));
  }
  if (degrees.size() != n) {
    throw Error(ErrorKind::kConsistency,
                fmt::format("drug {}: {} degree entries for {} atoms", drug_id, degrees.size(), n));
  }
  for (auto& [a, b] : bonds) {
    if (a >= n || b >= n) {
      throw Error(ErrorKind::kIndex, fmt::format("drug {}: bond ({}, {}) references an atom "
                                                 "outside [0, {})", drug_id, a, b, n));
    }
    if (a == b) {
      throw Error(ErrorKind::kConsistency,
                  fmt::format("drug {}: self bond on atom {}", drug_id, a));
    }
    if (a > b) std::swap(a, b);
  }
  std::sort(bonds.begin(), bonds.end());
  if (auto dup = std::adjacent_find(bonds.begin(), bonds.end()); dup != bonds.end()) {
    throw Error(ErrorKind::kConsistency, fmt::format("drug {}: duplicate bond ({}, {})", drug_id,
                                                     dup->first, dup->second));
  }
  std::vector<std::size_t> counted(n, 0);
  for (const auto& [a, b] : bonds) {
    ++counted[a];
    ++counted[b];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (counted[i] != degrees[i]) {
      throw Error(ErrorKind::kConsistency,
                  fmt::format("drug {}: atom {} has degree {} in the degree list but {} bonds",
                              drug_id, i, degrees[i], counted[i]));
    }
  }
  return MolecularGraph{std::move(drug_id), std::move(features), std::move(bonds),
                        std::move(degrees)};
}

MolecularGraph load_graph(const std::string& drug_id, const fs::path& feature_file,
                          const fs::path& adjacency_file, const fs::path& degree_file) {
  std::vector<double> values;
  std::size_t rows = 0;
  for (const auto& line : csv::read_lines(feature_file)) {
    const auto fields = csv::split(line.text);
    if (fields.size() != kAtomFeatureWidth) {
      throw Error(ErrorKind::kFormat, fmt::format("{}:{}: feature row has {} columns, expected {}",
                                                  feature_file.string(), line.number,
                                                  fields.size(), kAtomFeatureWidth));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto v = csv::to_double(fields[c]);
      if (!v || !std::isfinite(*v)) {
        throw Error(ErrorKind::kParse, fmt::format("{}:{}: column {} is not a finite number: '{}'",
                                                   feature_file.string(), line.number, c + 1,
                                                   fields[c]));
      }
      values.push_back(*v);
    }
    ++rows;
  }

  auto read_index = [](std::string_view field, const fs::path& file, std::size_t line) {
    const auto v = csv::to_integer(field);
    if (!v) {
      throw Error(ErrorKind::kParse, fmt::format("{}:{}: '{}' is not an integer", file.string(),
                                                 line, field));
    }
    if (*v < 0) {
      throw Error(ErrorKind::kIndex, fmt::format("{}:{}: negative index {}", file.string(), line,
                                                 *v));
    }
    return static_cast<std::size_t>(*v);
  };

  std::vector<std::pair<std::size_t, std::size_t>> bonds;
  for (const auto& line : csv::read_lines(adjacency_file)) {
    const auto fields = csv::split(line.text);
    if (fields.size() != 2) {
      throw Error(ErrorKind::kFormat, fmt::format("{}:{}: expected two atom indices, got {} fields",
                                                  adjacency_file.string(), line.number,
                                                  fields.size()));
    }
    bonds.emplace_back(read_index(fields[0], adjacency_file, line.number),
                       read_index(fields[1], adjacency_file, line.number));
  }

  std::vector<std::size_t> degrees;
  for (const auto& line : csv::read_lines(degree_file)) {
    const auto fields = csv::split(line.text);
    if (fields.size() != 1) {
      throw Error(ErrorKind::kFormat, fmt::format("{}:{}: expected one degree per row",
                                                  degree_file.string(), line.number));
    }
    degrees.push_back(read_index(fields[0], degree_file, line.number));
  }

  return make_graph(drug_id, Tensor(rows, kAtomFeatureWidth, std::move(values)), std::move(bonds),
                    std::move(degrees));
}

void save_graph(const MolecularGraph& graph, const fs::path& feature_file,
                const fs::path& adjacency_file, const fs::path& degree_file) {
  auto open = [](const fs::path& p) {
    std::ofstream out(p);
    if (!out) throw Error(ErrorKind::kIo, fmt::format("cannot write {}", p.string()));
    return out;
  };
  {
    auto out = open(feature_file);
    for (std::size_t r = 0; r < graph.features.rows(); ++r) {
      const auto row = graph.features.row_span(r);
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) out << ',';
        out << csv::format_double(row[c]);
      }
      out << '\n';
    }
  }
  {
    auto out = open(adjacency_file);
    for (const auto& [a, b] : graph.adjacency) out << a << ',' << b << '\n';
  }
  {
    auto out = open(degree_file);
    for (auto d : graph.degrees) out << d << '\n';
  }
}

Tensor normalized_adjacency(const MolecularGraph& graph, bool self_loops) {
  const std::size_t n = graph.atom_count();
  Tensor a(n, n);
  for (const auto& [i, j] : graph.adjacency) {
    a(i, j) = 1.0;
    a(j, i) = 1.0;
  }
  std::vector<double> inv_sqrt(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (self_loops) a(i, i) = 1.0;
    const double degree = static_cast<double>(graph.degrees[i]) + (self_loops ? 1.0 : 0.0);
    inv_sqrt[i] = degree > 0.0 ? 1.0 / std::sqrt(degree) : 0.0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a(i, j) *= inv_sqrt[i] * inv_sqrt[j];
  }
  return a;
}

PaddedGraph pad_graph(const MolecularGraph& graph, std::size_t n_max, bool self_loops) {
  const std::size_t n = graph.atom_count();
  if (n > n_max) {
    throw Error(ErrorKind::kCapacity, fmt::format("drug {} has {} atoms, capacity is {}",
                                                  graph.drug_id, n, n_max));
  }
  PaddedGraph padded;
  padded.atom_count = n;
  padded.features = Tensor(n_max, kAtomFeatureWidth);
  padded.norm_adjacency = Tensor(n_max, n_max);
  padded.mask.assign(n_max, 0);
  const Tensor adj = normalized_adjacency(graph, self_loops);
  for (std::size_t i = 0; i < n; ++i) {
    padded.mask[i] = 1;
    std::copy_n(graph.features.row_span(i).begin(), kAtomFeatureWidth,
                padded.features.row_span(i).begin());
    std::copy_n(adj.row_span(i).begin(), n, padded.norm_adjacency.row_span(i).begin());
  }
  return padded;
}

std::vector<DrugManifestEntry> load_drug_manifest(const fs::path& manifest) {
  const auto lines = csv::read_lines(manifest);
  if (lines.empty()) {
    throw Error(ErrorKind::kSchema, fmt::format("{}: missing header", manifest.string()));
  }
  const auto header = csv::split(lines.front().text);
  const std::vector<std::string_view> expected{"drug_id", "features", "adjacency", "degrees"};
  if (header != expected) {
    throw Error(ErrorKind::kSchema,
                fmt::format("{}: header must be drug_id,features,adjacency,degrees",
                            manifest.string()));
  }
  const fs::path base = manifest.parent_path();
  auto resolve = [&base](std::string_view p) {
    fs::path path{std::string(p)};
    return path.is_absolute() ? path : base / path;
  };
  std::vector<DrugManifestEntry> entries;
  std::vector<std::string> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = csv::split(lines[i].text);
    if (fields.size() != 4 || fields[0].empty()) {
      throw Error(ErrorKind::kFormat, fmt::format("{}:{}: expected 4 fields", manifest.string(),
                                                  lines[i].number));
    }
    std::string id(fields[0]);
    if (std::find(seen.begin(), seen.end(), id) != seen.end()) {
      throw Error(ErrorKind::kDuplication, fmt::format("{}:{}: drug {} listed twice",
                                                       manifest.string(), lines[i].number, id));
    }
    seen.push_back(id);
    entries.push_back(
        DrugManifestEntry{std::move(id), resolve(fields[1]), resolve(fields[2]), resolve(fields[3])});
  }
  return entries;
}

std::vector<MolecularGraph> load_drugs(const fs::path& manifest) {
  std::vector<MolecularGraph> graphs;
  for (const auto& e : load_drug_manifest(manifest)) {
    graphs.push_back(load_graph(e.drug_id, e.features, e.adjacency, e.degrees));
  }
  return graphs;
}

}  // namespace drugresp

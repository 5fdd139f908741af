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

#ifndef DRUGRESP_MOLGRAPH_HPP_
#define DRUGRESP_MOLGRAPH_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "drugresp/tensor.hpp"

namespace drugresp {

inline constexpr std::size_t kAtomFeatureWidth = 75;

// A drug as atoms (75 opaque features each) plus undirected bonds.
struct MolecularGraph {
  std::string drug_id;
  Tensor features;  // n_atoms × 75
  // Canonical (min, max) pairs, sorted, no duplicates, no self-pairs.
  std::vector<std::pair<std::size_t, std::size_t>> adjacency;
  std::vector<std::size_t> degrees;

  std::size_t atom_count() const { return features.rows(); }
  friend bool operator==(const MolecularGraph&, const MolecularGraph&) = default;
};

// Fixed-size form fed to the GCN. Real atoms occupy the leading rows.
struct PaddedGraph {
  Tensor features;        // n_max × 75
  Tensor norm_adjacency;  // n_max × n_max
  std::vector<std::uint8_t> mask;
  std::size_t atom_count = 0;

  std::size_t capacity() const { return mask.size(); }
};

// Validates and canonicalizes. Throws kIndex, kConsistency, kFormat.
MolecularGraph make_graph(std::string drug_id, Tensor features,
                          std::vector<std::pair<std::size_t, std::size_t>> bonds,
                          std::vector<std::size_t> degrees);

MolecularGraph load_graph(const std::string& drug_id, const std::filesystem::path& feature_file,
                          const std::filesystem::path& adjacency_file,
                          const std::filesystem::path& degree_file);

// Writes the three files in the same format load_graph reads.
void save_graph(const MolecularGraph& graph, const std::filesystem::path& feature_file,
                const std::filesystem::path& adjacency_file,
                const std::filesystem::path& degree_file);

// D̃^{-1/2}(A+I)D̃^{-1/2} with self loops, D^{-1/2}AD^{-1/2} without. Rows of
// atoms with zero degree (no self loop) stay zero.
Tensor normalized_adjacency(const MolecularGraph& graph, bool self_loops = true);

PaddedGraph pad_graph(const MolecularGraph& graph, std::size_t n_max, bool self_loops = true);

struct DrugManifestEntry {
  std::string drug_id;
  std::filesystem::path features;
  std::filesystem::path adjacency;
  std::filesystem::path degrees;
};

// CSV with header drug_id,features,adjacency,degrees. Relative paths resolve
// against the manifest's directory.
std::vector<DrugManifestEntry> load_drug_manifest(const std::filesystem::path& manifest);

std::vector<MolecularGraph> load_drugs(const std::filesystem::path& manifest);

}  // namespace drugresp

#endif  // DRUGRESP_MOLGRAPH_HPP_

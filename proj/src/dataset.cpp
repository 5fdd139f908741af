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

#include "drugresp/dataset.hpp"

#include <unordered_map>

namespace drugresp {

Dataset join_dataset(const std::vector<ResponseRecord>& responses,
                     const std::vector<MolecularGraph>& drugs, const CellFeatureSet& cells,
                     std::size_t n_max_atoms, bool self_loops, JoinStats* stats) {
  Dataset data;
  data.source = cells.source;

  std::unordered_map<std::string, std::size_t> drug_index;
  for (const auto& g : drugs) {
    drug_index.emplace(g.drug_id, data.drug_ids.size());
    data.drug_ids.push_back(g.drug_id);
    data.drugs.push_back(pad_graph(g, n_max_atoms, self_loops));
  }

  std::unordered_map<std::string, std::size_t> cell_index;
  data.cell_features = Tensor(cells.vectors.size(), cells.dim);
  for (const auto& [id, vec] : cells.vectors) {
    const std::size_t row = data.cell_ids.size();
    cell_index.emplace(id, row);
    data.cell_ids.push_back(id);
    std::copy(vec.begin(), vec.end(), data.cell_features.row_span(row).begin());
  }

  JoinStats local;
  local.total = responses.size();
  for (std::size_t r = 0; r < responses.size(); ++r) {
    const auto& rec = responses[r];
    const auto d = drug_index.find(rec.drug_id);
    const auto c = cell_index.find(rec.cell_line_id);
    if (d == drug_index.end() || c == cell_index.end()) {
      UnmatchedRow miss{r, rec.drug_id, rec.cell_line_id, d == drug_index.end(),
                        c == cell_index.end()};
      local.missing_drug += miss.missing_drug ? 1 : 0;
      local.missing_cell += miss.missing_cell ? 1 : 0;
      local.unmatched.push_back(std::move(miss));
      continue;
    }
    data.samples.push_back(Sample{d->second, c->second, rec.ic50, rec.cancer_type, r});
    ++local.matched;
  }
  if (stats) *stats = std::move(local);
  return data;
}

}  // namespace drugresp

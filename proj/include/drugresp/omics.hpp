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

#ifndef DRUGRESP_OMICS_HPP_
#define DRUGRESP_OMICS_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace drugresp {

// Raw (non-negative) expression of one cell line over its dataset's genes.
struct ExpressionProfile {
  std::string cell_line_id;
  std::shared_ptr<const std::vector<std::string>> gene_ids;
  std::vector<double> values;
};

enum class FeatureSource { kScgpt, kScfoundation, kRawExpression };

std::string_view to_string(FeatureSource source);
// Accepts "scgpt", "scfoundation", "raw" and "raw_expression".
FeatureSource parse_feature_source(std::string_view text);
// 512 for scGPT, 768 for scFoundation, nullopt for raw expression (its width
// follows the canonical gene list).
std::optional<std::size_t> declared_dim(FeatureSource source);

struct CellFeatureSet {
  FeatureSource source = FeatureSource::kScgpt;
  std::size_t dim = 0;
  // Ordered map keeps iteration deterministic.
  std::map<std::string, std::vector<double>> vectors;
};

struct ResponseRecord {
  std::string drug_id;
  std::string cell_line_id;
  double ic50 = 0.0;  // as supplied, no re-transformation
  std::optional<std::string> cancer_type;
};

struct AlignmentReport {
  std::size_t matched = 0;
  std::size_t padded = 0;   // canonical genes absent from the profile
  std::size_t dropped = 0;  // profile genes absent from the canonical list
};

std::vector<ExpressionProfile> load_expression(const std::filesystem::path& matrix_file);

std::vector<std::string> load_gene_list(const std::filesystem::path& path);

// Places the profile's values at canonical positions; absent genes are zero.
std::vector<double> align_genes(const ExpressionProfile& profile,
                                std::span<const std::string> canonical,
                                AlignmentReport* report = nullptr);

// log1p(v / Σv × 10⁶). Throws kNormalization when Σv is zero.
std::vector<double> cpm_log1p(std::span<const double> values);

CellFeatureSet load_embeddings(const std::filesystem::path& file, FeatureSource expected_source);

// Raw-expression feature set: aligned to `canonical` (or the matrix's own
// gene order when empty), then CPM + log1p per cell line.
CellFeatureSet build_expression_features(const std::vector<ExpressionProfile>& profiles,
                                         std::span<const std::string> canonical,
                                         AlignmentReport* report = nullptr);

std::vector<ResponseRecord> load_responses(const std::filesystem::path& file);

}  // namespace drugresp

#endif  // DRUGRESP_OMICS_HPP_

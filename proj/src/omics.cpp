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

#include "drugresp/omics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

#include "csv.hpp"
#include "drugresp/error.hpp"

namespace drugresp {

namespace fs = std::filesystem;

std::string_view to_string(FeatureSource source) {
  switch (source) {
    case FeatureSource::kScgpt: return "scgpt";
    case FeatureSource::kScfoundation: return "scfoundation";
    case FeatureSource::kRawExpression: return "raw";
  }
  return "unknown";
}

FeatureSource parse_feature_source(std::string_view text) {
  if (text == "scgpt") return FeatureSource::kScgpt;
  if (text == "scfoundation") return FeatureSource::kScfoundation;
  if (text == "raw" || text == "raw_expression") return FeatureSource::kRawExpression;
  throw Error(ErrorKind::kConfig,
              fmt::format("unknown feature source '{}' (scgpt|scfoundation|raw)", text));
}

std::optional<std::size_t> declared_dim(FeatureSource source) {
  switch (source) {
    case FeatureSource::kScgpt: return 512;
    case FeatureSource::kScfoundation: return 768;
    case FeatureSource::kRawExpression: return std::nullopt;
  }
  return std::nullopt;
}

std::vector<ExpressionProfile> load_expression(const fs::path& matrix_file) {
  const auto lines = csv::read_lines(matrix_file);
  if (lines.empty()) {
    throw Error(ErrorKind::kSchema, fmt::format("{}: missing header row", matrix_file.string()));
  }
  const auto header = csv::split(lines.front().text);
  auto genes = std::make_shared<std::vector<std::string>>();
  std::set<std::string, std::less<>> seen_genes;
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (!seen_genes.emplace(header[c]).second) {
      throw Error(ErrorKind::kDuplication, fmt::format("{}: gene {} appears twice in the header",
                                                       matrix_file.string(), header[c]));
    }
    genes->emplace_back(header[c]);
  }

  std::vector<ExpressionProfile> profiles;
  std::set<std::string, std::less<>> seen_cells;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& line = lines[i];
    const auto fields = csv::split(line.text);
    if (fields.size() != header.size()) {
      throw Error(ErrorKind::kFormat, fmt::format("{}:{}: {} columns, header has {}",
                                                  matrix_file.string(), line.number,
                                                  fields.size(), header.size()));
    }
    if (fields[0].empty()) {
      throw Error(ErrorKind::kFormat,
                  fmt::format("{}:{}: empty cell line id", matrix_file.string(), line.number));
    }
    if (!seen_cells.emplace(fields[0]).second) {
      throw Error(ErrorKind::kDuplication, fmt::format("{}:{}: cell line {} appears twice",
                                                       matrix_file.string(), line.number,
                                                       fields[0]));
    }
    ExpressionProfile profile{std::string(fields[0]), genes, {}};
    profile.values.reserve(genes->size());
    for (std::size_t c = 1; c < fields.size(); ++c) {
      const auto v = csv::to_double(fields[c]);
      if (!v || !std::isfinite(*v)) {
        throw Error(ErrorKind::kParse, fmt::format("{}:{}: column {} is not a number: '{}'",
                                                   matrix_file.string(), line.number, c + 1,
                                                   fields[c]));
      }
      if (*v < 0.0) {
        throw Error(ErrorKind::kDomain, fmt::format("{}:{}: column {} is negative ({})",
                                                    matrix_file.string(), line.number, c + 1, *v));
      }
      profile.values.push_back(*v);
    }
    profiles.push_back(std::move(profile));
  }
  return profiles;
}

std::vector<std::string> load_gene_list(const fs::path& path) {
  std::vector<std::string> genes;
  std::set<std::string, std::less<>> seen;
  for (const auto& line : csv::read_lines(path)) {
    const auto gene = csv::trim(line.text);
    if (!seen.emplace(gene).second) {
      throw Error(ErrorKind::kDuplication,
                  fmt::format("{}:{}: gene {} listed twice", path.string(), line.number, gene));
    }
    genes.emplace_back(gene);
  }
  if (genes.empty()) {
    throw Error(ErrorKind::kEmptySet, fmt::format("{}: gene list is empty", path.string()));
  }
  return genes;
}

std::vector<double> align_genes(const ExpressionProfile& profile,
                                std::span<const std::string> canonical, AlignmentReport* report) {
  std::unordered_map<std::string_view, std::size_t> position;
  position.reserve(canonical.size());
  for (std::size_t i = 0; i < canonical.size(); ++i) position.emplace(canonical[i], i);

  std::vector<double> out(canonical.size(), 0.0);
  AlignmentReport local;
  if (profile.gene_ids) {
    for (std::size_t g = 0; g < profile.gene_ids->size(); ++g) {
      auto it = position.find((*profile.gene_ids)[g]);
      if (it == position.end()) {
        ++local.dropped;
        continue;
      }
      out[it->second] = profile.values[g];
      ++local.matched;
    }
  }
  local.padded = canonical.size() - local.matched;
  if (report) {
    report->matched += local.matched;
    report->padded += local.padded;
    report->dropped += local.dropped;
  }
  return out;
}

std::vector<double> cpm_log1p(std::span<const double> values) {
  double total = 0.0;
  for (double v : values) total += v;
  if (!(total > 0.0)) {
    throw Error(ErrorKind::kNormalization, "cpm_log1p: vector sums to zero");
  }
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = std::log1p(values[i] / total * 1e6);
  }
  return out;
}

CellFeatureSet load_embeddings(const fs::path& file, FeatureSource expected_source) {
  const auto lines = csv::read_lines(file);
  if (lines.size() < 2) {
    throw Error(ErrorKind::kEmptySet, fmt::format("{}: no embedding rows", file.string()));
  }
  const std::size_t width = csv::split(lines.front().text).size();
  if (width < 2) {
    throw Error(ErrorKind::kFormat,
                fmt::format("{}: header must name cell_line_id and value columns", file.string()));
  }
  CellFeatureSet set;
  set.source = expected_source;
  set.dim = width - 1;
  if (auto expected = declared_dim(expected_source); expected && *expected != set.dim) {
    throw Error(ErrorKind::kDimension,
                fmt::format("{}: {} embeddings must be {}-dimensional, file has {}", file.string(),
                            to_string(expected_source), *expected, set.dim));
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = csv::split(lines[i].text);
    if (fields.size() != width) {
      throw Error(ErrorKind::kFormat, fmt::format("{}:{}: row has {} values, expected {}",
                                                  file.string(), lines[i].number,
                                                  fields.size() - 1, set.dim));
    }
    std::vector<double> vec;
    vec.reserve(set.dim);
    for (std::size_t c = 1; c < fields.size(); ++c) {
      const auto v = csv::to_double(fields[c]);
      if (!v || !std::isfinite(*v)) {
        throw Error(ErrorKind::kParse, fmt::format("{}:{}: column {} is not a number: '{}'",
                                                   file.string(), lines[i].number, c + 1,
                                                   fields[c]));
      }
      vec.push_back(*v);
    }
    if (!set.vectors.emplace(std::string(fields[0]), std::move(vec)).second) {
      throw Error(ErrorKind::kDuplication, fmt::format("{}:{}: cell line {} appears twice",
                                                       file.string(), lines[i].number, fields[0]));
    }
  }
  return set;
}

CellFeatureSet build_expression_features(const std::vector<ExpressionProfile>& profiles,
                                         std::span<const std::string> canonical,
                                         AlignmentReport* report) {
  CellFeatureSet set;
  set.source = FeatureSource::kRawExpression;
  for (const auto& p : profiles) {
    std::vector<double> aligned = canonical.empty() ? p.values : align_genes(p, canonical, report);
    std::vector<double> normalized;
    try {
      normalized = cpm_log1p(aligned);
    } catch (const Error& e) {
      throw Error(e.kind(), fmt::format("cell line {}: {}", p.cell_line_id, e.what()));
    }
    set.dim = normalized.size();
    set.vectors.emplace(p.cell_line_id, std::move(normalized));
  }
  if (set.vectors.empty()) throw Error(ErrorKind::kEmptySet, "expression matrix has no rows");
  return set;
}

std::vector<ResponseRecord> load_responses(const fs::path& file) {
  const auto lines = csv::read_lines(file);
  if (lines.empty()) {
    throw Error(ErrorKind::kSchema, fmt::format("{}: missing header row", file.string()));
  }
  const auto header = csv::split(lines.front().text);
  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto drug_col = column("drug_id");
  const auto cell_col = column("cell_line_id");
  const auto ic50_col = column("ic50");
  const auto type_col = column("cancer_type");
  for (auto [col, name] : {std::pair{drug_col, "drug_id"}, std::pair{cell_col, "cell_line_id"},
                           std::pair{ic50_col, "ic50"}}) {
    if (!col) {
      throw Error(ErrorKind::kSchema,
                  fmt::format("{}: missing required column '{}'", file.string(), name));
    }
  }

  std::vector<ResponseRecord> records;
  records.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = csv::split(lines[i].text);
    if (fields.size() != header.size()) {
      throw Error(ErrorKind::kFormat, fmt::format("{}:{}: {} columns, header has {}",
                                                  file.string(), lines[i].number, fields.size(),
                                                  header.size()));
    }
    ResponseRecord rec;
    rec.drug_id = std::string(fields[*drug_col]);
    rec.cell_line_id = std::string(fields[*cell_col]);
    if (rec.drug_id.empty() || rec.cell_line_id.empty()) {
      throw Error(ErrorKind::kValue,
                  fmt::format("{}:{}: empty drug or cell line id", file.string(), lines[i].number));
    }
    const auto ic50 = csv::to_double(fields[*ic50_col]);
    if (!ic50 || !std::isfinite(*ic50)) {
      throw Error(ErrorKind::kValue, fmt::format("{}:{}: ic50 '{}' is not a finite number",
                                                 file.string(), lines[i].number,
                                                 fields[*ic50_col]));
    }
    rec.ic50 = *ic50;
    if (type_col && !fields[*type_col].empty()) rec.cancer_type = std::string(fields[*type_col]);
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace drugresp

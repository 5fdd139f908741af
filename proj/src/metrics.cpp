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

#include "drugresp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "drugresp/error.hpp"

namespace drugresp {

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::kContract,
                fmt::format("pearson: lengths differ ({} vs {})", x.size(), y.size()));
  }
  if (x.size() < 2) return std::nullopt;
  // Single pass with running co-moments.
  double mean_x = 0.0, mean_y = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double n = static_cast<double>(i + 1);
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    mean_x += dx / n;
    mean_y += dy / n;
    const double dx2 = x[i] - mean_x;
    const double dy2 = y[i] - mean_y;
    sxx += dx * dx2;
    syy += dy * dy2;
    sxy += dx * dy2;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) return std::nullopt;
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

std::string_view to_string(GroupKind kind) {
  switch (kind) {
    case GroupKind::kCellLine: return "cell_line";
    case GroupKind::kCancerType: return "cancer_type";
    case GroupKind::kDrug: return "drug";
  }
  return "unknown";
}

std::map<std::string, GroupStat> grouped_pcc(std::span<const Prediction> predictions,
                                             GroupKind group_by) {
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> buckets;
  for (const auto& p : predictions) {
    const std::string* key = nullptr;
    switch (group_by) {
      case GroupKind::kCellLine: key = &p.cell_line_id; break;
      case GroupKind::kDrug: key = &p.drug_id; break;
      case GroupKind::kCancerType:
        if (!p.cancer_type) continue;
        key = &*p.cancer_type;
        break;
    }
    auto& [pred, obs] = buckets[*key];
    pred.push_back(p.predicted);
    obs.push_back(p.observed);
  }
  std::map<std::string, GroupStat> out;
  for (const auto& [key, pair] : buckets) {
    out.emplace(key, GroupStat{pearson(pair.first, pair.second), pair.first.size()});
  }
  return out;
}

std::vector<GainRow> compare_models(const LodoScores& model_a, const LodoScores* model_b,
                                    const LodoScores& baseline) {
  auto same_keys = [](const LodoScores& a, const LodoScores& b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(),
                      [](const auto& l, const auto& r) { return l.first == r.first; });
  };
  if (!same_keys(model_a, baseline) || (model_b && !same_keys(*model_b, baseline))) {
    throw Error(ErrorKind::kComparison, "compare_models: reports cover different drug sets");
  }
  auto gain = [](const std::optional<double>& m, const std::optional<double>& b) {
    return m && b ? std::optional<double>(*m - *b) : std::nullopt;
  };
  std::vector<GainRow> rows;
  for (const auto& [drug, base] : baseline) {
    GainRow row;
    row.drug_id = drug;
    row.gain_a = gain(model_a.at(drug), base);
    if (model_b) row.gain_b = gain(model_b->at(drug), base);
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const GainRow& l, const GainRow& r) {
    if (l.gain_a.has_value() != r.gain_a.has_value()) return l.gain_a.has_value();
    if (l.gain_a && *l.gain_a != *r.gain_a) return *l.gain_a < *r.gain_a;
    return l.drug_id < r.drug_id;
  });
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].rank = i + 1;
  return rows;
}

StabilityTable stability_report(
    const std::vector<std::pair<std::string, std::vector<EpochRecord>>>& histories) {
  StabilityTable table;
  if (histories.empty()) return table;

  int first_epoch = 0;
  int last_epoch = 0;
  for (std::size_t m = 0; m < histories.size(); ++m) {
    const auto& [name, history] = histories[m];
    if (history.empty()) {
      throw Error(ErrorKind::kMerge, fmt::format("history of {} is empty", name));
    }
    for (std::size_t i = 1; i < history.size(); ++i) {
      if (history[i].epoch != history[i - 1].epoch + 1) {
        throw Error(ErrorKind::kMerge,
                    fmt::format("history of {} is not a contiguous epoch run", name));
      }
    }
    if (m == 0) {
      first_epoch = history.front().epoch;
    } else if (history.front().epoch != first_epoch) {
      throw Error(ErrorKind::kMerge,
                  fmt::format("epoch ranges of {} and {} do not line up (start {} vs {})",
                              histories.front().first, name, first_epoch,
                              history.front().epoch));
    }
    last_epoch = std::max(last_epoch, history.back().epoch);
    table.models.push_back(name);
  }

  for (int e = first_epoch; e <= last_epoch; ++e) {
    table.epochs.push_back(e);
    std::vector<std::optional<double>> row;
    for (const auto& [name, history] : histories) {
      const auto offset = static_cast<std::size_t>(e - first_epoch);
      row.push_back(offset < history.size() ? std::optional(history[offset].val_pcc)
                                            : std::nullopt);
    }
    table.cells.push_back(std::move(row));
  }

  for (const auto& [name, history] : histories) {
    StabilitySummary s;
    s.model = name;
    s.epochs = history.size();
    s.final_pcc = history.back().val_pcc;
    s.max_pcc = -std::numeric_limits<double>::infinity();
    for (const auto& r : history) {
      if (!std::isnan(r.val_pcc)) s.max_pcc = std::max(s.max_pcc, r.val_pcc);
    }
    if (std::isinf(s.max_pcc)) s.max_pcc = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> diffs;
    for (std::size_t i = 1; i < history.size(); ++i) {
      diffs.push_back(history[i].val_pcc - history[i - 1].val_pcc);
    }
    if (!diffs.empty()) {
      double mean = 0.0;
      for (double d : diffs) mean += d;
      mean /= static_cast<double>(diffs.size());
      double var = 0.0;
      for (double d : diffs) var += (d - mean) * (d - mean);
      s.fluctuation = std::sqrt(var / static_cast<double>(diffs.size()));
    }
    table.summaries.push_back(std::move(s));
  }
  return table;
}

}  // namespace drugresp

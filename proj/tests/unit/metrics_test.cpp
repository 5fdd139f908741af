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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "drugresp/metrics.hpp"
#include "expect_error.hpp"

namespace drugresp {
namespace {

// Textbook two-pass formula.
double two_pass_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

TEST(Pearson, Examples) {
  EXPECT_NEAR(*pearson(std::vector<double>{1, 2, 3}, std::vector<double>{2, 4, 6}), 1.0, 1e-15);
  EXPECT_NEAR(*pearson(std::vector<double>{1, 2, 3}, std::vector<double>{6, 4, 2}), -1.0, 1e-15);
  EXPECT_NEAR(*pearson(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 3, 2, 4}), 0.8,
              1e-15);
}

TEST(Pearson, UndefinedCasesAreSignalsNotCrashes) {
  EXPECT_FALSE(pearson(std::vector<double>{1}, std::vector<double>{2}));
  EXPECT_FALSE(pearson(std::vector<double>{}, std::vector<double>{}));
  EXPECT_FALSE(pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}));
  EXPECT_FALSE(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{4, 4, 4}));
  EXPECT_ERROR_KIND(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}),
                    ErrorKind::kContract);
}

TEST(Pearson, SymmetricAndAffineInvariant) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(50), y(50);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = normal(rng);
      y[i] = 0.5 * x[i] + normal(rng);
    }
    const double r = *pearson(x, y);
    EXPECT_NEAR(*pearson(y, x), r, 1e-12);
    for (double a : {3.0, 0.01, -2.0}) {
      std::vector<double> ax(x);
      for (auto& v : ax) v = a * v + 7.0;
      EXPECT_NEAR(*pearson(ax, y), a > 0 ? r : -r, 1e-12);
    }
  }
}

TEST(Pearson, MatchesTwoPassOracle) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> length(2, 10000);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = length(rng);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = 10.0 + normal(rng);
      y[i] = x[i] * 0.3 + normal(rng);
    }
    EXPECT_NEAR(*pearson(x, y), two_pass_pearson(x, y), 1e-12) << "n=" << n;
  }
}

std::vector<Prediction> toy_predictions() {
  return {
      {"D1", "C1", "lung", 1.0, 1.1}, {"D1", "C2", "lung", 2.0, 1.9},
      {"D1", "C3", "skin", 3.0, 3.5}, {"D2", "C1", "lung", 0.5, 0.1},
      {"D2", "C2", "lung", 1.5, 1.7}, {"D2", "C3", std::nullopt, 2.5, 2.0},
      {"D3", "C1", "skin", 4.0, 4.0},
  };
}

TEST(GroupedPcc, SingleGroupEqualsOverall) {
  auto preds = toy_predictions();
  for (auto& p : preds) p.drug_id = "same";
  std::vector<double> x, y;
  for (const auto& p : preds) {
    x.push_back(p.predicted);
    y.push_back(p.observed);
  }
  const auto groups = grouped_pcc(preds, GroupKind::kDrug);
  ASSERT_EQ(groups.size(), 1u);
  EXPECT_EQ(groups.at("same").pcc, pearson(x, y));
  EXPECT_EQ(groups.at("same").n, preds.size());
}

TEST(GroupedPcc, SingleSampleGroupIsUndefined) {
  const auto groups = grouped_pcc(toy_predictions(), GroupKind::kDrug);
  EXPECT_FALSE(groups.at("D3").pcc.has_value());
  EXPECT_EQ(groups.at("D3").n, 1u);
  EXPECT_TRUE(groups.at("D1").pcc.has_value());
}

TEST(GroupedPcc, MissingCancerTypesAreLeftOut) {
  const auto groups = grouped_pcc(toy_predictions(), GroupKind::kCancerType);
  EXPECT_EQ(groups.at("lung").n, 4u);
  EXPECT_EQ(groups.at("skin").n, 2u);
  EXPECT_EQ(groups.size(), 2u);
}

TEST(GroupedPcc, MatchesBruteForcePerGroup) {
  const auto preds = toy_predictions();
  const auto groups = grouped_pcc(preds, GroupKind::kCellLine);
  for (const auto& [cell, stat] : groups) {
    std::vector<double> x, y;
    for (const auto& p : preds) {
      if (p.cell_line_id != cell) continue;
      x.push_back(p.predicted);
      y.push_back(p.observed);
    }
    ASSERT_TRUE(stat.pcc.has_value());
    EXPECT_NEAR(*stat.pcc, two_pass_pearson(x, y), 1e-12);
  }
}

TEST(CompareModels, IdenticalToBaselineGivesZeroGains) {
  const LodoScores scores{{"A", 0.3}, {"B", 0.6}, {"C", -0.1}};
  const auto rows = compare_models(scores, &scores, scores);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) {
    EXPECT_EQ(*r.gain_a, 0.0);
    EXPECT_EQ(r.gain_a, r.gain_b);
  }
}

TEST(CompareModels, SingleImprovedDrug) {
  const auto rows = compare_models({{"X", 0.7}}, nullptr, {{"X", 0.5}});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].rank, 1u);
  EXPECT_NEAR(*rows[0].gain_a, 0.2, 1e-15);
  EXPECT_FALSE(rows[0].gain_b.has_value());
}

TEST(CompareModels, RanksAscendByGainAndUndefinedGoLast) {
  const LodoScores a{{"A", 0.9}, {"B", 0.1}, {"C", std::nullopt}, {"D", 0.5}};
  const LodoScores base{{"A", 0.0}, {"B", 0.0}, {"C", 0.0}, {"D", 0.0}};
  const auto rows = compare_models(a, nullptr, base);
  std::vector<std::string> order;
  for (const auto& r : rows) order.push_back(r.drug_id);
  EXPECT_EQ(order, (std::vector<std::string>{"B", "D", "A", "C"}));
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(rows[i].rank, i + 1);
}

TEST(CompareModels, MismatchedDrugSetsAreAComparisonError) {
  EXPECT_ERROR_KIND(compare_models({{"A", 0.1}}, nullptr, {{"B", 0.1}}), ErrorKind::kComparison);
  const LodoScores b{{"A", 0.1}, {"B", 0.2}};
  EXPECT_ERROR_KIND(compare_models({{"A", 0.1}}, &b, {{"A", 0.1}}), ErrorKind::kComparison);
}

std::vector<EpochRecord> history(std::initializer_list<double> pccs, int first = 1) {
  std::vector<EpochRecord> h;
  int e = first;
  for (double p : pccs) h.push_back({e++, 1.0, p});
  return h;
}

TEST(Stability, ConstantHistoryHasZeroFluctuation) {
  const auto table = stability_report({{"m", history({0.7, 0.7, 0.7, 0.7})}});
  EXPECT_EQ(table.summaries[0].fluctuation, 0.0);
  EXPECT_EQ(table.summaries[0].max_pcc, 0.7);
}

TEST(Stability, IncreasingHistoryEndsAtItsMaximum) {
  const auto table = stability_report({{"m", history({0.5, 0.6, 0.8, 0.9})}});
  EXPECT_EQ(table.summaries[0].final_pcc, table.summaries[0].max_pcc);
  EXPECT_EQ(table.summaries[0].epochs, 4u);
}

TEST(Stability, FluctuationIsTheStdOfSuccessiveDifferences) {
  // Differences 0.2, -0.2: mean 0, population std 0.2.
  const auto table = stability_report({{"m", history({0.5, 0.7, 0.5})}});
  EXPECT_NEAR(table.summaries[0].fluctuation, 0.2, 1e-12);
}

TEST(Stability, ShorterHistoryIsMarkedStopped) {
  std::vector<double> long_run(20, 0.8), short_run(17, 0.6);
  std::vector<EpochRecord> a, b;
  for (int e = 1; e <= 20; ++e) a.push_back({e, 1.0, long_run[e - 1]});
  for (int e = 1; e <= 17; ++e) b.push_back({e, 1.0, short_run[e - 1]});
  const auto table = stability_report({{"scgpt", a}, {"raw", b}});
  ASSERT_EQ(table.epochs.size(), 20u);
  for (std::size_t e = 0; e < 20; ++e) {
    EXPECT_TRUE(table.cells[e][0].has_value());
    EXPECT_EQ(table.cells[e][1].has_value(), e < 17);
  }
  EXPECT_EQ(table.summaries[1].epochs, 17u);
}

TEST(Stability, SingleRunTableEqualsItsHistory) {
  const auto h = history({0.1, 0.4, 0.3});
  const auto table = stability_report({{"m", h}});
  ASSERT_EQ(table.epochs.size(), h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    EXPECT_EQ(table.epochs[i], h[i].epoch);
    EXPECT_EQ(*table.cells[i][0], h[i].val_pcc);
  }
}

TEST(Stability, MisalignedHistoriesAreMergeErrors) {
  EXPECT_ERROR_KIND(stability_report({{"a", history({0.1, 0.2})}, {"b", history({0.1}, 5)}}),
                    ErrorKind::kMerge);
  EXPECT_ERROR_KIND(stability_report({{"a", {}}}), ErrorKind::kMerge);
  auto gap = history({0.1, 0.2, 0.3});
  gap[2].epoch = 7;
  EXPECT_ERROR_KIND(stability_report({{"a", gap}}), ErrorKind::kMerge);
}

}  // namespace
}  // namespace drugresp

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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "drugresp/seeds.hpp"
#include "drugresp/trainer.hpp"
#include "expect_error.hpp"
#include "synthetic.hpp"

namespace drugresp {
namespace {

struct Fixture {
  Dataset data;
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> val_idx;
  ModelConfig model;
  TrainConfig train;
};

Fixture small_fixture() {
  testing::SyntheticSpec spec;
  spec.n_cells = 24;
  spec.cell_dim = 6;
  spec.n_drugs = 4;
  spec.min_atoms = 3;
  spec.max_atoms = 8;
  spec.n_max_atoms = 10;
  const auto synth = testing::make_synthetic(spec);
  Fixture f;
  f.data = testing::to_dataset(synth, synth.cell_signal, spec.n_max_atoms);
  for (std::size_t i = 0; i < f.data.samples.size(); ++i) {
    (i % 5 == 0 ? f.val_idx : f.train_idx).push_back(i);
  }
  f.model.gcn_layer_dims = {8, 8};
  f.model.cell_branch_dims = {8};
  f.model.head_dims = {8, 1};
  f.model.n_max_atoms = spec.n_max_atoms;
  f.model.cell_input_dim = spec.cell_dim;
  f.train.epochs = 3;
  f.train.batch_size = 16;
  f.train.adam.lr = 1e-3;
  f.train.seed = 5;
  return f;
}

TEST(Trainer, ZeroEpochsReturnsInitialParamsAndEmptyHistory) {
  Fixture f = small_fixture();
  f.train.epochs = 0;
  const auto result = train(f.data, f.train_idx, f.val_idx, f.model, f.train);
  EXPECT_TRUE(result.history.empty());
  EXPECT_EQ(result.best_epoch, 0);
  const ModelParams init = init_params(f.model, derive_seed(f.train.seed, "init"));
  const auto a = result.params.trainable(), b = init.trainable();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].value(), b[i].value());
}

TEST(Trainer, HistoryHasOneRecordPerEpoch) {
  Fixture f = small_fixture();
  std::vector<int> seen;
  const auto result = train(f.data, f.train_idx, f.val_idx, f.model, f.train,
                            [&](const EpochRecord& r) { seen.push_back(r.epoch); });
  ASSERT_EQ(result.history.size(), 3u);
  EXPECT_EQ(seen, (std::vector<int>{1, 2, 3}));
  for (const auto& r : result.history) {
    EXPECT_TRUE(std::isfinite(r.train_loss));
    EXPECT_TRUE(std::isfinite(r.val_pcc));
  }
  EXPECT_GE(result.best_epoch, 1);
  EXPECT_LE(result.best_epoch, 3);
}

TEST(Trainer, EarlyStopShortensTheHistory) {
  Fixture f = small_fixture();
  f.train.epochs = 20;
  f.train.adam.lr = 0.0;  // val_pcc never improves after epoch 1
  f.train.early_stop_patience = 3;
  const auto result = train(f.data, f.train_idx, f.val_idx, f.model, f.train);
  EXPECT_EQ(result.history.size(), 4u);
  EXPECT_EQ(result.best_epoch, 1);
}

TEST(Trainer, SameSeedIsBitReproducible) {
  Fixture f = small_fixture();
  f.model.dropout_rate = 0.2;
  const auto a = train(f.data, f.train_idx, f.val_idx, f.model, f.train);
  const auto b = train(f.data, f.train_idx, f.val_idx, f.model, f.train);
  EXPECT_EQ(a.history, b.history);
  const auto pa = a.params.trainable(), pb = b.params.trainable();
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(pa[i].value(), pb[i].value());
  f.train.seed = 6;
  const auto c = train(f.data, f.train_idx, f.val_idx, f.model, f.train);
  EXPECT_NE(a.history, c.history);
}

TEST(Trainer, NonFiniteLossIsADivergenceNamingEpochAndBatch) {
  Fixture f = small_fixture();
  f.data.samples[f.train_idx[0]].label = 1e300;
  try {
    train(f.data, f.train_idx, f.val_idx, f.model, f.train);
    FAIL() << "expected divergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDivergence);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("epoch 1"), std::string::npos) << msg;
    EXPECT_NE(msg.find("batch"), std::string::npos) << msg;
  }
}

TEST(Trainer, ContractErrors) {
  Fixture f = small_fixture();
  EXPECT_ERROR_KIND(train(f.data, {}, f.val_idx, f.model, f.train), ErrorKind::kContract);
  EXPECT_ERROR_KIND(train(f.data, f.train_idx, {}, f.model, f.train), ErrorKind::kContract);
  ModelConfig cls = f.model;
  cls.task = Task::kClassification;
  EXPECT_ERROR_KIND(train(f.data, f.train_idx, f.val_idx, cls, f.train), ErrorKind::kContract);
  ModelConfig wide = f.model;
  wide.cell_input_dim = 7;
  EXPECT_ERROR_KIND(train(f.data, f.train_idx, f.val_idx, wide, f.train), ErrorKind::kShape);
}

TEST(Trainer, ClassificationTrainsOnBinaryLabels) {
  Fixture f = small_fixture();
  std::vector<double> labels;
  for (const auto& s : f.data.samples) labels.push_back(s.label);
  std::vector<double> sorted(labels);
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double median = sorted[sorted.size() / 2];
  for (auto& s : f.data.samples) s.label = s.label > median ? 1.0 : 0.0;
  f.model.task = Task::kClassification;
  const auto result = train(f.data, f.train_idx, f.val_idx, f.model, f.train);
  ASSERT_EQ(result.history.size(), 3u);
  ModelParams params = result.params.clone();
  for (double p : predict_samples(f.data, f.val_idx, params, f.model)) {
    EXPECT_GT(p, 0.0);
    EXPECT_LT(p, 1.0);
  }
}

TEST(Trainer, CollectPredictionsPairsIdsWithValues) {
  Fixture f = small_fixture();
  const std::vector<std::size_t> idx{0, 3};
  const std::vector<double> pred{0.5, -0.5};
  const auto out = collect_predictions(f.data, idx, pred);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[1].drug_id, f.data.drug_ids[f.data.samples[3].drug]);
  EXPECT_EQ(out[1].cell_line_id, f.data.cell_ids[f.data.samples[3].cell]);
  EXPECT_EQ(out[1].observed, f.data.samples[3].label);
  EXPECT_EQ(out[1].predicted, -0.5);
  EXPECT_ERROR_KIND(collect_predictions(f.data, idx, std::vector<double>{1.0}),
                    ErrorKind::kContract);
}

}  // namespace
}  // namespace drugresp

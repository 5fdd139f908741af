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
#include <random>

#include "drugresp/gradcheck.hpp"
#include "drugresp/model.hpp"
#include "expect_error.hpp"
#include "synthetic.hpp"

namespace drugresp {
namespace {

ModelConfig small_config(std::size_t cell_dim = 6) {
  ModelConfig cfg;
  cfg.gcn_layer_dims = {8, 6};
  cfg.cell_branch_dims = {5};
  cfg.head_dims = {6, 1};
  cfg.dropout_rate = 0.0;
  cfg.n_max_atoms = 12;
  cfg.cell_input_dim = cell_dim;
  return cfg;
}

MolecularGraph continuous_graph(std::mt19937_64& rng, std::size_t n, const std::string& id) {
  auto g = testing::random_graph(rng, n, id);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& v : g.features.data()) v = normal(rng);
  return g;
}

Tensor random_cells(std::mt19937_64& rng, std::size_t rows, std::size_t dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Tensor t(rows, dim);
  for (auto& v : t.data()) v = normal(rng);
  return t;
}

MolecularGraph permuted(const MolecularGraph& g, const std::vector<std::size_t>& perm) {
  // Atom i of g becomes atom perm[i].
  const std::size_t n = g.atom_count();
  Tensor features(n, kAtomFeatureWidth);
  std::vector<std::size_t> degrees(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < kAtomFeatureWidth; ++j) features(perm[i], j) = g.features(i, j);
    degrees[perm[i]] = g.degrees[i];
  }
  std::vector<std::pair<std::size_t, std::size_t>> bonds;
  for (const auto& [a, b] : g.adjacency) bonds.emplace_back(perm[a], perm[b]);
  return make_graph(g.drug_id, std::move(features), std::move(bonds), std::move(degrees));
}

double relu(double x) { return x > 0 ? x : 0; }

// relu(row · W + b) through every GCN layer, computed by hand.
std::vector<double> mlp_on_row(const std::vector<double>& row, const ModelParams& params) {
  std::vector<double> h = row;
  for (const auto& layer : params.gcn) {
    const Tensor& w = layer.weight.value();
    std::vector<double> next(w.cols());
    for (std::size_t j = 0; j < w.cols(); ++j) {
      double s = layer.bias.value()[j];
      for (std::size_t i = 0; i < w.rows(); ++i) s += h[i] * w(i, j);
      next[j] = relu(s);
    }
    h = std::move(next);
  }
  return h;
}

TEST(Model, InitIsDeterministicPerSeedAndWithinGlorotBounds) {
  const ModelConfig cfg;
  const ModelParams a = init_params(cfg, 5);
  const ModelParams b = init_params(cfg, 5);
  const ModelParams c = init_params(cfg, 6);
  const auto pa = a.trainable(), pb = b.trainable(), pc = c.trainable();
  ASSERT_EQ(pa.size(), pb.size());
  bool any_difference = false;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    EXPECT_EQ(pa[i].value(), pb[i].value());
    any_difference |= !(pa[i].value() == pc[i].value());
  }
  EXPECT_TRUE(any_difference);

  for (const auto* group : {&a.gcn, &a.cell, &a.head}) {
    for (const auto& layer : *group) {
      const Tensor& w = layer.weight.value();
      const double bound = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
      for (double v : w.data()) EXPECT_LE(std::abs(v), bound);
      for (double v : layer.bias.value().data()) EXPECT_EQ(v, 0.0);
    }
  }
  // Batch-norm shifts replace the biases of the layers they follow.
  EXPECT_FALSE(a.cell[0].has_bias());
  EXPECT_FALSE(a.head[0].has_bias());
  EXPECT_TRUE(a.head.back().has_bias());
  EXPECT_TRUE(a.gcn[0].has_bias());
  for (const auto& bn : a.cell_norm) {
    for (double v : bn.scale.value().data()) EXPECT_EQ(v, 1.0);
    for (double v : bn.shift.value().data()) EXPECT_EQ(v, 0.0);
  }
}

TEST(Model, SingleAtomGraphEqualsPlainMlpOnItsFeatures) {
  std::mt19937_64 rng(1);
  const ModelConfig cfg = small_config();
  ModelParams params = init_params(cfg, 3);
  for (auto& layer : params.gcn) {
    for (auto& v : layer.bias.mutable_value().data()) v = std::normal_distribution<double>()(rng);
  }
  auto g = make_graph("one", random_cells(rng, 1, kAtomFeatureWidth), {}, {0});
  const auto padded = pad_graph(g, cfg.n_max_atoms);
  Tape tape(false);
  const Tensor out = encode_drug(tape, padded, params, cfg, Mode::kEval).value();
  const auto row = g.features.values();
  const auto expected = mlp_on_row(row, params);
  ASSERT_EQ(out.size(), expected.size());
  for (std::size_t j = 0; j < expected.size(); ++j) EXPECT_NEAR(out[j], expected[j], 1e-12);
}

TEST(Model, TwoIdenticalIsolatedAtomsPoolToTheSharedEmbedding) {
  std::mt19937_64 rng(2);
  const ModelConfig cfg = small_config();
  const ModelParams params = init_params(cfg, 4);
  const Tensor one = random_cells(rng, 1, kAtomFeatureWidth);
  Tensor both(2, kAtomFeatureWidth);
  for (std::size_t j = 0; j < kAtomFeatureWidth; ++j) both(0, j) = both(1, j) = one[j];
  const auto g = make_graph("twin", both, {}, {0, 0});
  Tape tape(false);
  const Tensor out =
      encode_drug(tape, pad_graph(g, cfg.n_max_atoms), params, cfg, Mode::kEval).value();
  const auto expected = mlp_on_row(one.values(), params);
  for (std::size_t j = 0; j < expected.size(); ++j) EXPECT_NEAR(out[j], expected[j], 1e-12);
}

TEST(Model, EncodeDrugIsAtomPermutationInvariant) {
  std::mt19937_64 rng(3);
  const ModelConfig cfg = small_config();
  for (int trial = 0; trial < 25; ++trial) {
    const ModelParams params = init_params(cfg, trial);
    const auto g = continuous_graph(rng, 2 + trial % 10, "p");
    std::vector<std::size_t> perm(g.atom_count());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Tape tape(false);
    const Tensor a =
        encode_drug(tape, pad_graph(g, cfg.n_max_atoms), params, cfg, Mode::kEval).value();
    const Tensor b = encode_drug(tape, pad_graph(permuted(g, perm), cfg.n_max_atoms), params, cfg,
                                 Mode::kEval)
                         .value();
    for (std::size_t j = 0; j < a.size(); ++j) EXPECT_NEAR(a[j], b[j], 1e-10);
  }
}

TEST(Model, PredictionsAreInvariantToPaddingCapacity) {
  std::mt19937_64 rng(4);
  ModelConfig narrow = small_config();
  ModelConfig wide = narrow;
  wide.n_max_atoms = 60;
  ModelParams params = init_params(narrow, 7);
  std::vector<MolecularGraph> graphs;
  for (int i = 0; i < 4; ++i) graphs.push_back(continuous_graph(rng, 3 + 2 * i, "g"));
  std::vector<PaddedGraph> pn, pw;
  for (const auto& g : graphs) {
    pn.push_back(pad_graph(g, narrow.n_max_atoms));
    pw.push_back(pad_graph(g, wide.n_max_atoms));
  }
  std::vector<const PaddedGraph*> bn, bw;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    bn.push_back(&pn[i]);
    bw.push_back(&pw[i]);
  }
  const Tensor cells = random_cells(rng, graphs.size(), narrow.cell_input_dim);
  std::mt19937_64 unused(0);
  Tape tape(false);
  const Tensor a = forward_batch(tape, bn, cells, params, narrow, Mode::kEval, unused).value();
  const Tensor b = forward_batch(tape, bw, cells, params, wide, Mode::kEval, unused).value();
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-10);
}

TEST(Model, EncodeDrugRejectsWrongCapacity) {
  std::mt19937_64 rng(5);
  const ModelConfig cfg = small_config();
  const ModelParams params = init_params(cfg, 1);
  Tape tape(false);
  EXPECT_ERROR_KIND(encode_drug(tape, pad_graph(testing::random_graph(rng, 3), 20), params, cfg,
                                Mode::kEval),
                    ErrorKind::kShape);
}

TEST(Model, EncodeCellExamples) {
  const ModelConfig cfg = small_config();
  ModelParams params = init_params(cfg, 2);
  std::mt19937_64 rng(6);
  Tape tape(false);
  const Tensor zero_out =
      encode_cell(tape, Variable(Tensor(3, cfg.cell_input_dim)), params, cfg, Mode::kEval, rng)
          .value();
  for (double v : zero_out.data()) EXPECT_EQ(v, 0.0);

  const Variable cells(random_cells(rng, 3, cfg.cell_input_dim));
  const Tensor first = encode_cell(tape, cells, params, cfg, Mode::kEval, rng).value();
  const Tensor second = encode_cell(tape, cells, params, cfg, Mode::kEval, rng).value();
  EXPECT_EQ(first, second);

  ModelConfig wide = cfg;
  wide.cell_input_dim = 768;
  ModelParams wide_params = init_params(wide, 2);
  EXPECT_ERROR_KIND(encode_cell(tape, Variable(Tensor(2, 512)), wide_params, wide, Mode::kEval,
                                rng),
                    ErrorKind::kShape);
}

TEST(Model, ClassificationOutputsLieStrictlyInsideUnitInterval) {
  std::mt19937_64 rng(7);
  ModelConfig cfg = small_config();
  cfg.task = Task::kClassification;
  ModelParams params = init_params(cfg, 9);
  std::vector<PaddedGraph> padded;
  for (int i = 0; i < 8; ++i) padded.push_back(pad_graph(continuous_graph(rng, 4, "c"), 12));
  std::vector<const PaddedGraph*> batch;
  for (const auto& p : padded) batch.push_back(&p);
  for (double scale : {1.0, 10.0}) {
    Tensor cells = random_cells(rng, batch.size(), cfg.cell_input_dim);
    for (auto& v : cells.data()) v *= scale;
    Tape tape(false);
    const Tensor out =
        forward_batch(tape, batch, cells, params, cfg, Mode::kEval, rng).value();
    for (double v : out.data()) {
      EXPECT_GT(v, 0.0);
      EXPECT_LT(v, 1.0);
    }
  }
}

TEST(Model, EvalPredictionsAreBitIdentical) {
  std::mt19937_64 rng(8);
  ModelConfig cfg = small_config();
  cfg.dropout_rate = 0.3;
  ModelParams params = init_params(cfg, 1);
  const auto padded = pad_graph(continuous_graph(rng, 5, "e"), 12);
  const std::vector<const PaddedGraph*> batch{&padded, &padded};
  const Tensor cells = random_cells(rng, 2, cfg.cell_input_dim);
  Tape tape(false);
  const Tensor a = forward_batch(tape, batch, cells, params, cfg, Mode::kEval, rng).value();
  const Tensor b = forward_batch(tape, batch, cells, params, cfg, Mode::kEval, rng).value();
  EXPECT_EQ(a, b);
}

TEST(Model, FullModelGradientMatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed + 100);
    const ModelConfig cfg = small_config();
    ModelParams params = init_params(cfg, seed);
    std::vector<PaddedGraph> padded;
    for (int i = 0; i < 3; ++i) padded.push_back(pad_graph(continuous_graph(rng, 3 + i, "f"), 12));
    const std::vector<const PaddedGraph*> batch{&padded[0], &padded[1], &padded[2]};
    const Tensor cells = random_cells(rng, 3, cfg.cell_input_dim);
    const Tensor target = random_cells(rng, 3, 1);
    std::vector<Variable> trainable = params.trainable();
    const double err = finite_diff_check_params(
        [&](Tape& tape) {
          std::mt19937_64 dropout_rng(0);
          Variable pred =
              forward_batch(tape, batch, cells, params, cfg, Mode::kTrain, dropout_rng);
          return tape.loss(pred, target, LossKind::kMse);
        },
        trainable);
    EXPECT_LT(err, 1e-4) << "seed " << seed;
  }
}

TEST(Model, CheckpointRoundTripIsBitExact) {
  testing::TempDir dir("ckpt");
  ModelConfig cfg = small_config();
  cfg.task = Task::kClassification;
  cfg.bn_momentum = 0.9;
  ModelParams params = init_params(cfg, 11);
  params.cell_norm[0].running_mean[0] = 0.1 + 0.2;  // not exactly representable
  save_checkpoint(dir.path() / "c.txt", cfg, params);
  const Checkpoint back = load_checkpoint(dir.path() / "c.txt");
  EXPECT_EQ(back.config, cfg);
  const auto a = params.trainable(), b = back.params.trainable();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].value(), b[i].value());
  EXPECT_EQ(back.params.cell_norm[0].running_mean, params.cell_norm[0].running_mean);
  EXPECT_EQ(back.params.head_norm[0].running_var, params.head_norm[0].running_var);
}

TEST(Model, CheckpointRejectsOtherVersionsAndTruncation) {
  testing::TempDir dir("ckpt");
  const ModelConfig cfg = small_config();
  save_checkpoint(dir.path() / "c.txt", cfg, init_params(cfg, 1));
  std::string text = testing::read_text(dir.path() / "c.txt");
  const auto eol = text.find('\n');
  testing::write_text(dir.path() / "v2.txt", "drugresp-checkpoint 2" + text.substr(eol));
  EXPECT_ERROR_KIND(load_checkpoint(dir.path() / "v2.txt"), ErrorKind::kCheckpoint);
  testing::write_text(dir.path() / "cut.txt", text.substr(0, text.size() / 2));
  EXPECT_ERROR_KIND(load_checkpoint(dir.path() / "cut.txt"), ErrorKind::kCheckpoint);
}

}  // namespace
}  // namespace drugresp

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

#include "drugresp/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "drugresp/error.hpp"
#include "drugresp/seeds.hpp"

namespace drugresp {

namespace {

struct Batch {
  std::vector<const PaddedGraph*> graphs;
  Tensor cells;
  Tensor labels;
};

Batch make_batch(const Dataset& data, std::span<const std::size_t> idx) {
  Batch batch;
  batch.graphs.reserve(idx.size());
  batch.cells = Tensor(idx.size(), data.cell_dim());
  batch.labels = Tensor(idx.size(), 1);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const Sample& s = data.samples.at(idx[i]);
    batch.graphs.push_back(&data.drugs[s.drug]);
    const auto src = data.cell_features.row_span(s.cell);
    std::copy(src.begin(), src.end(), batch.cells.row_span(i).begin());
    batch.labels[i] = s.label;
  }
  return batch;
}

// Batch boundaries over n shuffled samples. A trailing batch of one is folded
// into its predecessor so train-mode batch norm always sees ≥2 rows.
std::vector<std::pair<std::size_t, std::size_t>> batch_ranges(std::size_t n, std::size_t size) {
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  for (std::size_t begin = 0; begin < n; begin += size) {
    ranges.emplace_back(begin, std::min(n, begin + size));
  }
  if (ranges.size() >= 2 && ranges.back().second - ranges.back().first == 1) {
    ranges[ranges.size() - 2].second = ranges.back().second;
    ranges.pop_back();
  }
  return ranges;
}

double validation_pcc(const Dataset& data, std::span<const std::size_t> val_idx,
                      ModelParams& params, const ModelConfig& cfg) {
  const auto predicted = predict_samples(data, val_idx, params, cfg);
  std::vector<double> observed;
  observed.reserve(val_idx.size());
  for (auto i : val_idx) observed.push_back(data.samples[i].label);
  return pearson(predicted, observed).value_or(std::numeric_limits<double>::quiet_NaN());
}

}  // namespace

TrainResult train(const Dataset& data, std::span<const std::size_t> train_idx,
                  std::span<const std::size_t> val_idx, const ModelConfig& model_cfg,
                  const TrainConfig& train_cfg, const EpochCallback& on_epoch) {
  model_cfg.validate();
  if (train_idx.empty() || val_idx.empty()) {
    throw Error(ErrorKind::kContract, fmt::format("train needs non-empty sets (train {}, val {})",
                                                  train_idx.size(), val_idx.size()));
  }
  if (train_cfg.batch_size == 0) throw Error(ErrorKind::kParameter, "batch_size must be positive");
  if (data.cell_dim() != model_cfg.cell_input_dim) {
    throw Error(ErrorKind::kShape, fmt::format("dataset cell features are {}-dimensional, model "
                                               "expects {}", data.cell_dim(),
                                               model_cfg.cell_input_dim));
  }
  if (model_cfg.task == Task::kClassification) {
    for (auto i : train_idx) {
      const double y = data.samples.at(i).label;
      if (y != 0.0 && y != 1.0) {
        throw Error(ErrorKind::kContract,
                    fmt::format("classification task needs 0/1 labels, sample {} has {}", i, y));
      }
    }
  }
  const LossKind loss_kind =
      model_cfg.task == Task::kRegression ? LossKind::kMse : LossKind::kBce;

  TrainResult result;
  ModelParams params = init_params(model_cfg, derive_seed(train_cfg.seed, "init"));
  result.params = params.clone();
  if (train_cfg.epochs == 0) return result;

  std::vector<Variable> trainable = params.trainable();
  AdamState adam = AdamState::create(trainable, train_cfg.adam);
  std::mt19937_64 shuffle_rng(derive_seed(train_cfg.seed, "shuffle"));
  std::mt19937_64 dropout_rng(derive_seed(train_cfg.seed, "dropout"));
  std::vector<std::size_t> order(train_idx.begin(), train_idx.end());

  double best_pcc = -std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  for (std::size_t epoch = 1; epoch <= train_cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    std::size_t batch_no = 0;
    for (const auto& [begin, end] : batch_ranges(order.size(), train_cfg.batch_size)) {
      ++batch_no;
      const auto slice = std::span<const std::size_t>(order).subspan(begin, end - begin);
      Batch batch = make_batch(data, slice);
      params.zero_grad();
      double loss_value = 0.0;
      try {
        Tape tape;
        Variable pred = forward_batch(tape, batch.graphs, batch.cells, params, model_cfg,
                                      Mode::kTrain, dropout_rng);
        Variable loss = tape.loss(pred, batch.labels, loss_kind);
        loss_value = loss.value()[0];
        tape.backward(loss);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kNumeric && e.kind() != ErrorKind::kDomain) throw;
        throw Error(ErrorKind::kDivergence,
                    fmt::format("training diverged at epoch {}, batch {}: {}", epoch, batch_no,
                                e.what()));
      }
      if (!std::isfinite(loss_value)) {
        throw Error(ErrorKind::kDivergence,
                    fmt::format("non-finite loss at epoch {}, batch {}", epoch, batch_no));
      }
      adam_step(trainable, adam);
      loss_sum += loss_value * static_cast<double>(slice.size());
    }

    EpochRecord record;
    record.epoch = static_cast<int>(epoch);
    record.train_loss = loss_sum / static_cast<double>(order.size());
    record.val_pcc = validation_pcc(data, val_idx, params, model_cfg);
    result.history.push_back(record);
    if (on_epoch) on_epoch(record);

    if (!std::isnan(record.val_pcc) && record.val_pcc > best_pcc) {
      best_pcc = record.val_pcc;
      result.params = params.clone();
      result.best_epoch = record.epoch;
      since_best = 0;
    } else {
      ++since_best;
    }
    if (train_cfg.early_stop_patience && since_best >= *train_cfg.early_stop_patience) break;
  }
  if (result.best_epoch == 0) {
    result.params = params.clone();
    result.best_epoch = result.history.back().epoch;
  }
  return result;
}

std::vector<double> predict_samples(const Dataset& data, std::span<const std::size_t> idx,
                                    ModelParams& params, const ModelConfig& cfg,
                                    std::size_t batch_size) {
  std::vector<double> out;
  out.reserve(idx.size());
  std::mt19937_64 unused_rng(0);
  for (std::size_t begin = 0; begin < idx.size(); begin += batch_size) {
    const auto slice = idx.subspan(begin, std::min(batch_size, idx.size() - begin));
    Batch batch = make_batch(data, slice);
    Tape tape(false);
    Variable pred =
        forward_batch(tape, batch.graphs, batch.cells, params, cfg, Mode::kEval, unused_rng);
    for (std::size_t i = 0; i < slice.size(); ++i) out.push_back(pred.value()[i]);
  }
  return out;
}

std::vector<Prediction> collect_predictions(const Dataset& data, std::span<const std::size_t> idx,
                                            std::span<const double> predicted) {
  if (idx.size() != predicted.size()) {
    throw Error(ErrorKind::kContract, "collect_predictions: length mismatch");
  }
  std::vector<Prediction> out;
  out.reserve(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const Sample& s = data.samples.at(idx[i]);
    out.push_back(Prediction{data.drug_ids[s.drug], data.cell_ids[s.cell], s.cancer_type,
                             predicted[i], s.label});
  }
  return out;
}

}  // namespace drugresp

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

#ifndef DRUGRESP_TRAINER_HPP_
#define DRUGRESP_TRAINER_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "drugresp/dataset.hpp"
#include "drugresp/metrics.hpp"
#include "drugresp/model.hpp"
#include "drugresp/optim.hpp"

namespace drugresp {

struct TrainConfig {
  std::size_t epochs = 20;
  std::size_t batch_size = 64;
  AdamOptions adam;
  std::uint64_t seed = 0;
  // Stop once val_pcc has not improved for this many epochs.
  std::optional<std::size_t> early_stop_patience;
};

struct TrainResult {
  ModelParams params;  // from the best-validation epoch
  std::vector<EpochRecord> history;
  int best_epoch = 0;  // 0 when no epoch ran
};

// Called after every epoch; used for progress output.
using EpochCallback = std::function<void(const EpochRecord&)>;

// Mini-batch Adam on `train_idx` (indices into data.samples) with val_pcc
// tracked on `val_idx` in eval mode after each epoch. Throws kDivergence on a
// non-finite loss and kContract on empty sets or labels that do not fit the
// task.
TrainResult train(const Dataset& data, std::span<const std::size_t> train_idx,
                  std::span<const std::size_t> val_idx, const ModelConfig& model_cfg,
                  const TrainConfig& train_cfg, const EpochCallback& on_epoch = {});

// Eval-mode predictions for the given samples, in order.
std::vector<double> predict_samples(const Dataset& data, std::span<const std::size_t> idx,
                                    ModelParams& params, const ModelConfig& cfg,
                                    std::size_t batch_size = 256);

std::vector<Prediction> collect_predictions(const Dataset& data, std::span<const std::size_t> idx,
                                            std::span<const double> predicted);

}  // namespace drugresp

#endif  // DRUGRESP_TRAINER_HPP_

// Copyright 2026 The Frontline Authors. All Rights Reserved.
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

#ifndef FRONTLINE_NN_TRAIN_HPP_
#define FRONTLINE_NN_TRAIN_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "frontline/nn/unet.hpp"
#include "frontline/raster.hpp"

namespace frontline::nn {

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 3;
  // Stop once the validation loss has not improved for this many epochs.
  int patience = 30;
  LossKind loss = LossKind::kMse;
  int max_epochs = 1000;
  std::uint64_t seed = 0;

  void validate() const;
};

// One training pair; both tensors are (1, C, H, W).
template <typename T>
struct Example {
  Tensor<T> input;
  Tensor<T> target;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

template <typename T>
struct TrainResult {
  UNet<T> model;            // parameters from the best validation epoch
  std::vector<EpochRecord> history;
  int best_epoch = 0;
  double best_val_loss = 0.0;
};

// Called after each epoch; returning false stops training early.
using EpochCallback = std::function<bool(const EpochRecord&)>;

// Mini-batch Adam training with a seeded per-epoch shuffle and early
// stopping on the validation loss (strict improvement). Throws
// DatasetError for empty sets and DivergenceError on a non-finite loss.
template <typename T>
TrainResult<T> train(const UNetConfig& model_config,
                     const std::vector<Example<T>>& train_set,
                     const std::vector<Example<T>>& val_set,
                     const TrainConfig& config,
                     const EpochCallback& on_epoch = {});

// Mean per-example loss in inference mode.
template <typename T>
double evaluate_loss(const UNet<T>& model, const std::vector<Example<T>>& set,
                     LossKind kind, int batch_size);

// Stacks examples [begin, end) into a batch.
template <typename T>
Example<T> make_batch(const std::vector<Example<T>>& set,
                      const std::vector<std::size_t>& order, std::size_t begin,
                      std::size_t end);

template <typename T>
Tensor<T> to_tensor(const Raster& image);

// Sample 0, channel 0 as a raster.
template <typename T>
Raster to_raster(const Tensor<T>& t, Resolution resolution, ValueDomain domain);

// Single inference-mode pass on one image. The image must already have the
// network's input size.
template <typename T>
Raster predict(const UNet<T>& model, const Raster& image, ValueDomain domain);

}  // namespace frontline::nn

#endif  // FRONTLINE_NN_TRAIN_HPP_

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

#include "frontline/nn/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace frontline::nn {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ParameterError("learning rate must be > 0");
  if (batch_size < 1) throw ParameterError("batch size must be >= 1");
  if (patience < 1) throw ParameterError("patience must be >= 1");
  if (max_epochs < 1) throw ParameterError("max_epochs must be >= 1");
}

template <typename T>
Example<T> make_batch(const std::vector<Example<T>>& set,
                      const std::vector<std::size_t>& order, std::size_t begin,
                      std::size_t end) {
  const Example<T>& first = set[order[begin]];
  const int n = static_cast<int>(end - begin);
  Example<T> batch{Tensor<T>(n, first.input.c(), first.input.h(), first.input.w()),
                   Tensor<T>(n, first.target.c(), first.target.h(),
                             first.target.w())};
  const std::size_t in_size = first.input.size();
  const std::size_t out_size = first.target.size();
  for (int i = 0; i < n; ++i) {
    const Example<T>& e = set[order[begin + i]];
    if (e.input.size() != in_size || e.target.size() != out_size) {
      throw DimensionError("examples in a batch must share shapes");
    }
    std::copy(e.input.data(), e.input.data() + in_size, batch.input.sample(i));
    std::copy(e.target.data(), e.target.data() + out_size, batch.target.sample(i));
  }
  return batch;
}

template <typename T>
double evaluate_loss(const UNet<T>& model, const std::vector<Example<T>>& set,
                     LossKind kind, int batch_size) {
  if (set.empty()) throw DatasetError("cannot evaluate an empty set");
  std::vector<std::size_t> order(set.size());
  std::iota(order.begin(), order.end(), 0);
  double total = 0.0;
  for (std::size_t b = 0; b < set.size(); b += batch_size) {
    const std::size_t e = std::min(set.size(), b + batch_size);
    const Example<T> batch = make_batch(set, order, b, e);
    const Tensor<T> pred = model.infer(batch.input);
    total += loss(kind, pred, batch.target).value * static_cast<double>(e - b);
  }
  return total / static_cast<double>(set.size());
}

template <typename T>
TrainResult<T> train(const UNetConfig& model_config,
                     const std::vector<Example<T>>& train_set,
                     const std::vector<Example<T>>& val_set,
                     const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  if (train_set.empty()) throw DatasetError("training set is empty");
  if (val_set.empty()) throw DatasetError("validation set is empty");

  UNet<T> model(model_config, config.seed);
  TrainResult<T> result{model, {}, 0, std::numeric_limits<double>::infinity()};
  const AdamOptions adam{config.learning_rate};
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  ForwardCache<T> cache;
  int since_best = 0;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double train_total = 0.0;
    for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
      const std::size_t e = std::min(order.size(), b + config.batch_size);
      const Example<T> batch = make_batch(train_set, order, b, e);
      const Tensor<T> pred = model.forward_train(batch.input, cache);
      const LossResult<T> l = loss(config.loss, pred, batch.target);
      if (!std::isfinite(l.value)) {
        throw DivergenceError("non-finite training loss at epoch " +
                              std::to_string(epoch));
      }
      train_total += l.value * static_cast<double>(e - b);
      Gradients<T> grads;
      if (config.loss == LossKind::kBce) {
        // d BCE / d logit = (p - t) / n, which stays informative where the
        // sigmoid saturates.
        Tensor<T> dz = pred;
        auto d = dz.values();
        auto t = batch.target.values();
        const double n = static_cast<double>(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) {
          d[i] = static_cast<T>((static_cast<double>(d[i]) - t[i]) / n);
        }
        grads = model.backward_from_logits(cache, dz);
      } else {
        grads = model.backward(cache, l.grad);
      }
      adam_step(model.mutable_parameters(), grads, adam);
    }
    EpochRecord record{epoch, train_total / static_cast<double>(order.size()),
                       evaluate_loss(model, val_set, config.loss, config.batch_size)};
    if (!std::isfinite(record.val_loss)) {
      throw DivergenceError("non-finite validation loss at epoch " +
                            std::to_string(epoch));
    }
    result.history.push_back(record);
    if (record.val_loss < result.best_val_loss) {
      result.best_val_loss = record.val_loss;
      result.best_epoch = epoch;
      result.model = model;
      since_best = 0;
    } else {
      ++since_best;
    }
    if (on_epoch && !on_epoch(record)) break;
    if (since_best >= config.patience) break;
  }
  return result;
}

template <typename T>
Tensor<T> to_tensor(const Raster& image) {
  Tensor<T> t(1, 1, image.height(), image.width());
  auto px = image.pixels();
  std::transform(px.begin(), px.end(), t.data(),
                 [](double v) { return static_cast<T>(v); });
  return t;
}

template <typename T>
Raster to_raster(const Tensor<T>& t, Resolution resolution, ValueDomain domain) {
  std::vector<double> px(t.plane_size());
  const T* p = t.plane(0, 0);
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = static_cast<double>(p[i]);
  return Raster(t.w(), t.h(), std::move(px), resolution, domain);
}

template <typename T>
Raster predict(const UNet<T>& model, const Raster& image, ValueDomain domain) {
  const Tensor<T> out = model.infer(to_tensor<T>(image));
  return to_raster(out, image.resolution(), domain);
}

#define FRONTLINE_INSTANTIATE_TRAIN(T)                                          \
  template Example<T> make_batch(const std::vector<Example<T>>&,                \
                                 const std::vector<std::size_t>&, std::size_t,  \
                                 std::size_t);                                  \
  template double evaluate_loss(const UNet<T>&, const std::vector<Example<T>>&, \
                                LossKind, int);                                 \
  template TrainResult<T> train(const UNetConfig&,                              \
                                const std::vector<Example<T>>&,                 \
                                const std::vector<Example<T>>&,                 \
                                const TrainConfig&, const EpochCallback&);      \
  template Tensor<T> to_tensor<T>(const Raster&);                               \
  template Raster to_raster(const Tensor<T>&, Resolution, ValueDomain);         \
  template Raster predict(const UNet<T>&, const Raster&, ValueDomain);

FRONTLINE_INSTANTIATE_TRAIN(float)
FRONTLINE_INSTANTIATE_TRAIN(double)

#undef FRONTLINE_INSTANTIATE_TRAIN

}  // namespace frontline::nn

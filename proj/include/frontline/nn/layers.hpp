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

#ifndef FRONTLINE_NN_LAYERS_HPP_
#define FRONTLINE_NN_LAYERS_HPP_

#include <cstdint>
#include <vector>

#include "frontline/nn/tensor.hpp"

namespace frontline::nn {

// Layer kernels with hand-written backward passes. Weights are tensors:
//   conv2d:           (C_out, C_in, k, k), bias (1, C_out, 1, 1)
//   transposed_conv2: (C_in, C_out, 4, 4), bias (1, C_out, 1, 1)
//   batch norm:       scale / shift / running stats (1, C, 1, 1)

template <typename T>
struct ConvGrads {
  Tensor<T> input;
  Tensor<T> weights;
  Tensor<T> bias;
};

// Stride-1 convolution with zero "same" padding; odd kernels only.
template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& weights,
                 const Tensor<T>& bias);

template <typename T>
ConvGrads<T> conv2d_backward(const Tensor<T>& x, const Tensor<T>& weights,
                             const Tensor<T>& grad_out);

// 4x4 kernel, stride 2, padding 1: output is exactly twice the input size.
template <typename T>
Tensor<T> transposed_conv2(const Tensor<T>& x, const Tensor<T>& weights,
                           const Tensor<T>& bias);

template <typename T>
ConvGrads<T> transposed_conv2_backward(const Tensor<T>& x,
                                       const Tensor<T>& weights,
                                       const Tensor<T>& grad_out);

enum class Mode { kTrain, kInfer };

struct BatchNormOptions {
  double epsilon = 1e-5;
  // running = momentum * running + (1 - momentum) * batch
  double momentum = 0.9;
};

template <typename T>
struct BatchNormCache {
  Tensor<T> normalized;        // x_hat
  std::vector<double> inv_std; // per channel
};

// Train mode standardises with batch statistics (biased variance) and
// updates the running mean / unbiased variance; infer mode uses the running
// statistics. `cache` may be null in infer mode.
template <typename T>
Tensor<T> batch_norm(const Tensor<T>& x, const Tensor<T>& scale,
                     const Tensor<T>& shift, Tensor<T>& running_mean,
                     Tensor<T>& running_var, Mode mode,
                     BatchNormCache<T>* cache,
                     const BatchNormOptions& options = {});

template <typename T>
struct BatchNormGrads {
  Tensor<T> input;
  Tensor<T> scale;
  Tensor<T> shift;
};

// Backward of the train-mode transform.
template <typename T>
BatchNormGrads<T> batch_norm_backward(const BatchNormCache<T>& cache,
                                      const Tensor<T>& scale,
                                      const Tensor<T>& grad_out);

template <typename T>
Tensor<T> leaky_relu(const Tensor<T>& x, double slope = 0.01);

template <typename T>
Tensor<T> leaky_relu_backward(const Tensor<T>& x, const Tensor<T>& grad_out,
                              double slope = 0.01);

// 2x2 max pooling. `argmax` receives, per output element, the flat index of
// the winning input element; ties go to the first in row-major order.
template <typename T>
Tensor<T> max_pool2(const Tensor<T>& x, std::vector<std::uint32_t>* argmax);

template <typename T>
Tensor<T> max_pool2_backward(const Tensor<T>& x,
                             const std::vector<std::uint32_t>& argmax,
                             const Tensor<T>& grad_out);

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& x);

// Channel concatenation [a, b].
template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b);

// Inverse of concat_channels for gradients.
template <typename T>
void split_channels(const Tensor<T>& g, int channels_a, Tensor<T>& ga,
                    Tensor<T>& gb);

enum class LossKind { kMse, kBce };

template <typename T>
struct LossResult {
  double value = 0.0;
  Tensor<T> grad;  // d loss / d pred
};

// Mean squared error or mean binary cross-entropy (pred clamped to
// [1e-7, 1 - 1e-7]; the gradient is zero where the clamp is active).
template <typename T>
LossResult<T> loss(LossKind kind, const Tensor<T>& pred,
                   const Tensor<T>& target);

}  // namespace frontline::nn

#endif  // FRONTLINE_NN_LAYERS_HPP_

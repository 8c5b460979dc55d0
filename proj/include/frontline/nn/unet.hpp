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

#ifndef FRONTLINE_NN_UNET_HPP_
#define FRONTLINE_NN_UNET_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "frontline/nn/layers.hpp"
#include "frontline/nn/tensor.hpp"

namespace frontline::nn {

// Encoder-decoder with skip connections. Each block is two
// conv -> batch norm -> leaky ReLU stages; the encoder halves the
// resolution `depth` times with 2x2 max pooling and doubles the filters,
// the decoder upsamples with 4x4 / stride 2 transposed convolutions and
// concatenates the matching encoder features. A final 3x3 convolution with
// a sigmoid produces one channel.
struct UNetConfig {
  int depth = 5;
  int base_filters = 32;
  int input_channels = 1;
  int conv_kernel = 5;
  int upconv_kernel = 4;
  int final_kernel = 3;
  double leaky_slope = 0.01;

  void validate() const;
  // Filters of encoder level `level` (0-based); level == depth is the
  // bottleneck.
  int filters(int level) const { return base_filters << level; }
  bool operator==(const UNetConfig&) const = default;
};

template <typename T>
struct Parameter {
  std::string name;
  Tensor<T> value;
  Tensor<T> first_moment;
  Tensor<T> second_moment;
};

// Trainable tensors in declaration order plus the non-trainable batch-norm
// running statistics and the Adam step counter.
template <typename T>
struct ParameterSet {
  std::vector<Parameter<T>> params;
  std::vector<std::string> buffer_names;
  std::vector<Tensor<T>> buffers;
  std::int64_t step = 0;

  std::size_t parameter_count() const;
};

template <typename T>
using Gradients = std::vector<Tensor<T>>;

// Builds the parameter layout for `config` and draws every convolution
// weight from Normal(0, sqrt(2 / fan_in)); biases and batch-norm shifts are
// zero, scales one, running variances one. fan_in is C_in * k * k for
// convolutions and C_in * (k / stride)^2 for the transposed ones.
template <typename T>
ParameterSet<T> he_init(const UNetConfig& config, std::uint64_t seed);

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// One bias-corrected Adam update; increments the step counter.
template <typename T>
void adam_step(ParameterSet<T>& params, const Gradients<T>& grads,
               const AdamOptions& options);

// Positions of one conv -> batch norm stage inside a ParameterSet.
struct StageIndex {
  int weight = -1;
  int bias = -1;
  int scale = -1;
  int shift = -1;
  int running_mean = -1;  // into ParameterSet::buffers
  int running_var = -1;
};

struct BlockIndex {
  StageIndex first;
  StageIndex second;
};

struct UNetLayout {
  std::vector<BlockIndex> encoder;  // level 0 .. depth-1
  BlockIndex bottleneck;
  std::vector<int> up_weight;       // level 0 .. depth-1
  std::vector<int> up_bias;
  std::vector<BlockIndex> decoder;  // level 0 .. depth-1
  int final_weight = -1;
  int final_bias = -1;
};

UNetLayout make_layout(const UNetConfig& config);

template <typename T>
struct StageCache {
  Tensor<T> input;       // conv input
  Tensor<T> normalized;  // batch-norm output, leaky ReLU input
  BatchNormCache<T> bn;
};

template <typename T>
struct BlockCache {
  StageCache<T> first;
  StageCache<T> second;
};

template <typename T>
struct ForwardCache {
  std::vector<BlockCache<T>> encoder;
  std::vector<std::vector<std::uint32_t>> pool_argmax;
  std::vector<Tensor<T>> skips;
  BlockCache<T> bottleneck;
  std::vector<Tensor<T>> up_inputs;
  std::vector<BlockCache<T>> decoder;
  Tensor<T> final_input;
  Tensor<T> output;
};

template <typename T>
class UNet {
 public:
  UNet(const UNetConfig& config, ParameterSet<T> params);
  UNet(const UNetConfig& config, std::uint64_t seed)
      : UNet(config, he_init<T>(config, seed)) {}

  const UNetConfig& config() const { return config_; }
  const ParameterSet<T>& parameters() const { return params_; }
  ParameterSet<T>& mutable_parameters() { return params_; }

  // Throws DimensionError unless the spatial size is divisible by 2^depth
  // and the channel count matches.
  void check_input(const Tensor<T>& x) const;

  // Inference-mode pass (running batch-norm statistics); sigmoid output.
  Tensor<T> infer(const Tensor<T>& x) const;

  // Train-mode pass: batch statistics, running statistics updated, caches
  // kept for backward. Returns the sigmoid output.
  Tensor<T> forward_train(const Tensor<T>& x, ForwardCache<T>& cache);

  // Gradients for every parameter given d loss / d logits (pre-sigmoid).
  Gradients<T> backward_from_logits(const ForwardCache<T>& cache,
                                    const Tensor<T>& grad_logits) const;

  // Same, given d loss / d output.
  Gradients<T> backward(const ForwardCache<T>& cache,
                        const Tensor<T>& grad_output) const;

  // Train- or infer-mode output that leaves the running statistics alone.
  Tensor<T> evaluate(const Tensor<T>& x, Mode mode) const;

 private:
  // `running` receives batch-norm running-statistic updates in train mode.
  Tensor<T> run(const Tensor<T>& x, Mode mode, std::vector<Tensor<T>>& running,
                ForwardCache<T>* cache) const;

  UNetConfig config_;
  ParameterSet<T> params_;
  UNetLayout layout_;
};

}  // namespace frontline::nn

#endif  // FRONTLINE_NN_UNET_HPP_

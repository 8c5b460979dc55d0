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

#include "frontline/nn/unet.hpp"

#include <cmath>
#include <random>
#include <string>

namespace frontline::nn {

void UNetConfig::validate() const {
  if (depth < 1) throw ParameterError("U-Net depth must be >= 1");
  if (base_filters < 1) throw ParameterError("U-Net base_filters must be >= 1");
  if (input_channels < 1) throw ParameterError("U-Net needs >= 1 input channel");
  if (conv_kernel < 1 || conv_kernel % 2 == 0) {
    throw ParameterError("U-Net conv_kernel must be odd");
  }
  if (final_kernel < 1 || final_kernel % 2 == 0) {
    throw ParameterError("U-Net final_kernel must be odd");
  }
  if (upconv_kernel != 4) {
    throw ParameterError("only 4x4 / stride 2 transposed convolutions are supported");
  }
  if (!(leaky_slope >= 0.0)) throw ParameterError("leaky slope must be >= 0");
}

template <typename T>
std::size_t ParameterSet<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params) n += p.value.size();
  return n;
}

namespace {

enum class InitKind { kHe, kZero, kOne };

struct ParamSpec {
  std::string name;
  std::array<int, 4> shape;
  InitKind init;
  double fan_in = 0.0;
};

struct BufferSpec {
  std::string name;
  int channels;
  double fill;
};

class LayoutBuilder {
 public:
  explicit LayoutBuilder(const UNetConfig& config) : config_(config) {
    config.validate();
    const int depth = config.depth;
    const int k = config.conv_kernel;
    layout_.encoder.resize(depth);
    layout_.decoder.resize(depth);
    layout_.up_weight.resize(depth);
    layout_.up_bias.resize(depth);
    for (int l = 0; l < depth; ++l) {
      const int cin = l == 0 ? config.input_channels : config.filters(l - 1);
      layout_.encoder[l] = block("enc" + std::to_string(l), cin,
                                 config.filters(l), k);
    }
    layout_.bottleneck = block("bottleneck", config.filters(depth - 1),
                               config.filters(depth), k);
    for (int l = depth - 1; l >= 0; --l) {
      const int cin = config.filters(l + 1);
      const int cout = config.filters(l);
      const std::string name = "up" + std::to_string(l);
      layout_.up_weight[l] = add({name + ".weight", {cin, cout, 4, 4}, InitKind::kHe,
                                  static_cast<double>(cin) * 4.0});
      layout_.up_bias[l] = add({name + ".bias", {1, cout, 1, 1}, InitKind::kZero});
      layout_.decoder[l] = block("dec" + std::to_string(l), 2 * cout, cout, k);
    }
    const int fk = config.final_kernel;
    const int f0 = config.filters(0);
    layout_.final_weight = add({"final.weight", {1, f0, fk, fk}, InitKind::kHe,
                                static_cast<double>(f0) * fk * fk});
    layout_.final_bias = add({"final.bias", {1, 1, 1, 1}, InitKind::kZero});
  }

  const UNetLayout& layout() const { return layout_; }
  const std::vector<ParamSpec>& params() const { return params_; }
  const std::vector<BufferSpec>& buffers() const { return buffers_; }

 private:
  int add(ParamSpec spec) {
    params_.push_back(std::move(spec));
    return static_cast<int>(params_.size()) - 1;
  }

  int add_buffer(BufferSpec spec) {
    buffers_.push_back(std::move(spec));
    return static_cast<int>(buffers_.size()) - 1;
  }

  StageIndex stage(const std::string& name, int cin, int cout, int k) {
    StageIndex s;
    s.weight = add({name + ".conv.weight", {cout, cin, k, k}, InitKind::kHe,
                    static_cast<double>(cin) * k * k});
    s.bias = add({name + ".conv.bias", {1, cout, 1, 1}, InitKind::kZero});
    s.scale = add({name + ".bn.scale", {1, cout, 1, 1}, InitKind::kOne});
    s.shift = add({name + ".bn.shift", {1, cout, 1, 1}, InitKind::kZero});
    s.running_mean = add_buffer({name + ".bn.running_mean", cout, 0.0});
    s.running_var = add_buffer({name + ".bn.running_var", cout, 1.0});
    return s;
  }

  BlockIndex block(const std::string& name, int cin, int cout, int k) {
    BlockIndex b;
    b.first = stage(name + ".0", cin, cout, k);
    b.second = stage(name + ".1", cout, cout, k);
    return b;
  }

  UNetConfig config_;
  UNetLayout layout_;
  std::vector<ParamSpec> params_;
  std::vector<BufferSpec> buffers_;
};

}  // namespace

UNetLayout make_layout(const UNetConfig& config) {
  return LayoutBuilder(config).layout();
}

template <typename T>
ParameterSet<T> he_init(const UNetConfig& config, std::uint64_t seed) {
  const LayoutBuilder builder(config);
  ParameterSet<T> set;
  std::mt19937_64 rng(seed);
  for (const ParamSpec& spec : builder.params()) {
    const auto [n, c, h, w] = spec.shape;
    Parameter<T> p{spec.name, Tensor<T>(n, c, h, w), Tensor<T>(n, c, h, w),
                   Tensor<T>(n, c, h, w)};
    switch (spec.init) {
      case InitKind::kHe: {
        std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / spec.fan_in));
        for (T& v : p.value.values()) v = static_cast<T>(normal(rng));
        break;
      }
      case InitKind::kZero:
        break;
      case InitKind::kOne:
        p.value.fill(T(1));
        break;
    }
    set.params.push_back(std::move(p));
  }
  for (const BufferSpec& spec : builder.buffers()) {
    set.buffer_names.push_back(spec.name);
    set.buffers.emplace_back(1, spec.channels, 1, 1, static_cast<T>(spec.fill));
  }
  return set;
}

template <typename T>
void adam_step(ParameterSet<T>& params, const Gradients<T>& grads,
               const AdamOptions& options) {
  if (grads.size() != params.params.size()) {
    throw DimensionError("adam_step: " + std::to_string(grads.size()) +
                         " gradients for " + std::to_string(params.params.size()) +
                         " parameters");
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    require_same_shape(params.params[i].value, grads[i], "adam_step");
  }
  ++params.step;
  const double b1 = options.beta1;
  const double b2 = options.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(params.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(params.step));
  for (std::size_t i = 0; i < grads.size(); ++i) {
    Parameter<T>& p = params.params[i];
    auto value = p.value.values();
    auto m = p.first_moment.values();
    auto v = p.second_moment.values();
    auto g = grads[i].values();
    for (std::size_t j = 0; j < value.size(); ++j) {
      const double gj = g[j];
      const double mj = b1 * m[j] + (1.0 - b1) * gj;
      const double vj = b2 * v[j] + (1.0 - b2) * gj * gj;
      m[j] = static_cast<T>(mj);
      v[j] = static_cast<T>(vj);
      const double step = options.learning_rate * (mj / c1) /
                          (std::sqrt(vj / c2) + options.epsilon);
      value[j] = static_cast<T>(value[j] - step);
    }
  }
}

template <typename T>
UNet<T>::UNet(const UNetConfig& config, ParameterSet<T> params)
    : config_(config), params_(std::move(params)), layout_(make_layout(config)) {
  const LayoutBuilder builder(config);
  if (params_.params.size() != builder.params().size() ||
      params_.buffers.size() != builder.buffers().size()) {
    throw DimensionError("parameter set does not match the U-Net layout");
  }
  for (std::size_t i = 0; i < params_.params.size(); ++i) {
    const auto& spec = builder.params()[i];
    const auto& shape = params_.params[i].value.shape();
    if (shape != spec.shape) {
      throw DimensionError("parameter " + spec.name + " has shape " +
                           params_.params[i].value.shape_string());
    }
  }
  for (std::size_t i = 0; i < params_.buffers.size(); ++i) {
    if (params_.buffers[i].size() !=
        static_cast<std::size_t>(builder.buffers()[i].channels)) {
      throw DimensionError("buffer " + builder.buffers()[i].name +
                           " has the wrong size");
    }
  }
}

template <typename T>
void UNet<T>::check_input(const Tensor<T>& x) const {
  const int factor = 1 << config_.depth;
  if (x.c() != config_.input_channels) {
    throw DimensionError("U-Net expects " + std::to_string(config_.input_channels) +
                         " input channel(s), got " + std::to_string(x.c()));
  }
  if (x.n() < 1 || x.h() < factor || x.w() < factor || x.h() % factor != 0 ||
      x.w() % factor != 0) {
    throw DimensionError("U-Net input " + x.shape_string() +
                         " must have spatial dimensions divisible by " +
                         std::to_string(factor));
  }
}

namespace {

template <typename T>
Tensor<T> run_stage(const Tensor<T>& x, const StageIndex& idx,
                    const ParameterSet<T>& p, std::vector<Tensor<T>>& running,
                    Mode mode, double slope, StageCache<T>* cache) {
  const Tensor<T> z = conv2d(x, p.params[idx.weight].value, p.params[idx.bias].value);
  Tensor<T> n = batch_norm(z, p.params[idx.scale].value, p.params[idx.shift].value,
                           running[idx.running_mean], running[idx.running_var],
                           mode, cache ? &cache->bn : nullptr);
  Tensor<T> out = leaky_relu(n, slope);
  if (cache) {
    cache->input = x;
    cache->normalized = std::move(n);
  }
  return out;
}

template <typename T>
Tensor<T> run_block(const Tensor<T>& x, const BlockIndex& idx,
                    const ParameterSet<T>& p, std::vector<Tensor<T>>& running,
                    Mode mode, double slope, BlockCache<T>* cache) {
  const Tensor<T> h = run_stage(x, idx.first, p, running, mode, slope,
                                cache ? &cache->first : nullptr);
  return run_stage(h, idx.second, p, running, mode, slope,
                   cache ? &cache->second : nullptr);
}

template <typename T>
Tensor<T> back_stage(const Tensor<T>& grad, const StageIndex& idx,
                     const ParameterSet<T>& p, const StageCache<T>& cache,
                     double slope, Gradients<T>& grads) {
  const Tensor<T> dn = leaky_relu_backward(cache.normalized, grad, slope);
  BatchNormGrads<T> bg = batch_norm_backward(cache.bn, p.params[idx.scale].value, dn);
  grads[idx.scale] = std::move(bg.scale);
  grads[idx.shift] = std::move(bg.shift);
  ConvGrads<T> cg = conv2d_backward(cache.input, p.params[idx.weight].value, bg.input);
  grads[idx.weight] = std::move(cg.weights);
  grads[idx.bias] = std::move(cg.bias);
  return std::move(cg.input);
}

template <typename T>
Tensor<T> back_block(const Tensor<T>& grad, const BlockIndex& idx,
                     const ParameterSet<T>& p, const BlockCache<T>& cache,
                     double slope, Gradients<T>& grads) {
  const Tensor<T> g = back_stage(grad, idx.second, p, cache.second, slope, grads);
  return back_stage(g, idx.first, p, cache.first, slope, grads);
}

}  // namespace

template <typename T>
Tensor<T> UNet<T>::run(const Tensor<T>& x, Mode mode,
                       std::vector<Tensor<T>>& running,
                       ForwardCache<T>* cache) const {
  check_input(x);
  const int depth = config_.depth;
  const double slope = config_.leaky_slope;
  if (cache) {
    cache->encoder.assign(depth, {});
    cache->decoder.assign(depth, {});
    cache->pool_argmax.assign(depth, {});
    cache->up_inputs.assign(depth, {});
  }
  std::vector<Tensor<T>> skips(depth);
  Tensor<T> h = x;
  for (int l = 0; l < depth; ++l) {
    skips[l] = run_block(h, layout_.encoder[l], params_, running, mode, slope,
                         cache ? &cache->encoder[l] : nullptr);
    h = max_pool2(skips[l], cache ? &cache->pool_argmax[l] : nullptr);
  }
  h = run_block(h, layout_.bottleneck, params_, running, mode, slope,
                cache ? &cache->bottleneck : nullptr);
  for (int l = depth - 1; l >= 0; --l) {
    const Tensor<T> up = transposed_conv2(h, params_.params[layout_.up_weight[l]].value,
                                          params_.params[layout_.up_bias[l]].value);
    if (cache) cache->up_inputs[l] = h;
    h = run_block(concat_channels(up, skips[l]), layout_.decoder[l], params_,
                  running, mode, slope, cache ? &cache->decoder[l] : nullptr);
  }
  const Tensor<T> logits = conv2d(h, params_.params[layout_.final_weight].value,
                                  params_.params[layout_.final_bias].value);
  Tensor<T> out = sigmoid(logits);
  if (cache) {
    cache->skips = std::move(skips);
    cache->final_input = std::move(h);
    cache->output = out;
  }
  return out;
}

template <typename T>
Tensor<T> UNet<T>::infer(const Tensor<T>& x) const {
  return evaluate(x, Mode::kInfer);
}

template <typename T>
Tensor<T> UNet<T>::evaluate(const Tensor<T>& x, Mode mode) const {
  std::vector<Tensor<T>> running = params_.buffers;
  return run(x, mode, running, nullptr);
}

template <typename T>
Tensor<T> UNet<T>::forward_train(const Tensor<T>& x, ForwardCache<T>& cache) {
  return run(x, Mode::kTrain, params_.buffers, &cache);
}

template <typename T>
Gradients<T> UNet<T>::backward_from_logits(const ForwardCache<T>& cache,
                                           const Tensor<T>& grad_logits) const {
  require_same_shape(cache.output, grad_logits, "backward_from_logits");
  const int depth = config_.depth;
  const double slope = config_.leaky_slope;
  Gradients<T> grads(params_.params.size());

  ConvGrads<T> fg = conv2d_backward(cache.final_input,
                                    params_.params[layout_.final_weight].value,
                                    grad_logits);
  grads[layout_.final_weight] = std::move(fg.weights);
  grads[layout_.final_bias] = std::move(fg.bias);
  Tensor<T> g = std::move(fg.input);

  std::vector<Tensor<T>> skip_grads(depth);
  for (int l = 0; l < depth; ++l) {
    const Tensor<T> dcat = back_block(g, layout_.decoder[l], params_,
                                      cache.decoder[l], slope, grads);
    Tensor<T> dup;
    split_channels(dcat, config_.filters(l), dup, skip_grads[l]);
    ConvGrads<T> ug = transposed_conv2_backward(
        cache.up_inputs[l], params_.params[layout_.up_weight[l]].value, dup);
    grads[layout_.up_weight[l]] = std::move(ug.weights);
    grads[layout_.up_bias[l]] = std::move(ug.bias);
    g = std::move(ug.input);
  }
  g = back_block(g, layout_.bottleneck, params_, cache.bottleneck, slope, grads);
  for (int l = depth - 1; l >= 0; --l) {
    Tensor<T> de = max_pool2_backward(cache.skips[l], cache.pool_argmax[l], g);
    auto dv = de.values();
    auto sv = skip_grads[l].values();
    for (std::size_t i = 0; i < dv.size(); ++i) dv[i] += sv[i];
    g = back_block(de, layout_.encoder[l], params_, cache.encoder[l], slope, grads);
  }
  return grads;
}

template <typename T>
Gradients<T> UNet<T>::backward(const ForwardCache<T>& cache,
                               const Tensor<T>& grad_output) const {
  require_same_shape(cache.output, grad_output, "backward");
  Tensor<T> dz = grad_output;
  auto y = cache.output.values();
  auto d = dz.values();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] *= y[i] * (T(1) - y[i]);
  return backward_from_logits(cache, dz);
}

template struct ParameterSet<float>;
template struct ParameterSet<double>;
template ParameterSet<float> he_init<float>(const UNetConfig&, std::uint64_t);
template ParameterSet<double> he_init<double>(const UNetConfig&, std::uint64_t);
template void adam_step(ParameterSet<float>&, const Gradients<float>&,
                        const AdamOptions&);
template void adam_step(ParameterSet<double>&, const Gradients<double>&,
                        const AdamOptions&);
template class UNet<float>;
template class UNet<double>;

}  // namespace frontline::nn

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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "frontline/error.hpp"
#include "frontline/io.hpp"
#include "frontline/nn/checkpoint.hpp"
#include "frontline/nn/layers.hpp"
#include "frontline/nn/train.hpp"
#include "frontline/nn/unet.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"

namespace frontline::nn {
namespace {

using testing::random_tensor;

// Direct zero-padded "same" convolution.
Tensor<double> naive_conv(const Tensor<double>& x, const Tensor<double>& w,
                          const Tensor<double>& b) {
  const int k = w.h();
  const int pad = k / 2;
  Tensor<double> y(x.n(), w.n(), x.h(), x.w());
  for (int n = 0; n < x.n(); ++n) {
    for (int co = 0; co < w.n(); ++co) {
      for (int yy = 0; yy < x.h(); ++yy) {
        for (int xx = 0; xx < x.w(); ++xx) {
          double acc = b.data()[co];
          for (int ci = 0; ci < x.c(); ++ci) {
            for (int ky = 0; ky < k; ++ky) {
              for (int kx = 0; kx < k; ++kx) {
                const int sy = yy + ky - pad;
                const int sx = xx + kx - pad;
                if (sy < 0 || sx < 0 || sy >= x.h() || sx >= x.w()) continue;
                acc += w(co, ci, ky, kx) * x(n, ci, sy, sx);
              }
            }
          }
          y(n, co, yy, xx) = acc;
        }
      }
    }
  }
  return y;
}

// Scatter form of the 4x4, stride-2, padding-1 transposed convolution.
Tensor<double> naive_transposed(const Tensor<double>& x, const Tensor<double>& w,
                                const Tensor<double>& b) {
  const int oh = 2 * x.h();
  const int ow = 2 * x.w();
  Tensor<double> y(x.n(), w.c(), oh, ow);
  for (int n = 0; n < x.n(); ++n) {
    for (int co = 0; co < w.c(); ++co) {
      for (int i = 0; i < oh * ow; ++i) y.plane(n, co)[i] = b.data()[co];
      for (int ci = 0; ci < x.c(); ++ci) {
        for (int iy = 0; iy < x.h(); ++iy) {
          for (int ix = 0; ix < x.w(); ++ix) {
            for (int ky = 0; ky < 4; ++ky) {
              for (int kx = 0; kx < 4; ++kx) {
                const int oy = 2 * iy - 1 + ky;
                const int ox = 2 * ix - 1 + kx;
                if (oy < 0 || ox < 0 || oy >= oh || ox >= ow) continue;
                y(n, co, oy, ox) += x(n, ci, iy, ix) * w(ci, co, ky, kx);
              }
            }
          }
        }
      }
    }
  }
  return y;
}

void expect_near(const Tensor<double>& a, const Tensor<double>& b, double tol) {
  ASSERT_TRUE(a.same_shape(b)) << a.shape_string() << " vs " << b.shape_string();
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_NEAR(a.values()[i], b.values()[i], tol) << "at " << i;
  }
}

TEST(Layers, ConvMatchesDirectSum) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const int k = 1 + 2 * static_cast<int>(rng() % 3);
    auto x = random_tensor<double>(rng, 2, 3, 4 + trial % 5, 9 - trial % 4);
    auto w = random_tensor<double>(rng, 4, 3, k, k);
    auto b = random_tensor<double>(rng, 1, 4, 1, 1);
    expect_near(conv2d(x, w, b), naive_conv(x, w, b), 1e-12);
  }
  Tensor<double> x(1, 2, 4, 4), w(1, 3, 5, 5), b(1, 1, 1, 1);
  EXPECT_THROW(conv2d(x, w, b), DimensionError);
  Tensor<double> even(1, 2, 4, 4);
  EXPECT_THROW(conv2d(x, even, b), DimensionError);
}

TEST(Layers, TransposedConvMatchesScatter) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 8; ++trial) {
    auto x = random_tensor<double>(rng, 2, 3, 2 + trial % 4, 3 + trial % 3);
    auto w = random_tensor<double>(rng, 3, 2, 4, 4);
    auto b = random_tensor<double>(rng, 1, 2, 1, 1);
    const auto y = transposed_conv2(x, w, b);
    EXPECT_EQ(y.h(), 2 * x.h());
    EXPECT_EQ(y.w(), 2 * x.w());
    expect_near(y, naive_transposed(x, w, b), 1e-12);
  }
}

TEST(Layers, BatchNormStatistics) {
  std::mt19937_64 rng(3);
  auto x = random_tensor<double>(rng, 3, 2, 4, 5, -3.0, 5.0);
  Tensor<double> scale(1, 2, 1, 1, 1.0), shift(1, 2, 1, 1, 0.0);
  Tensor<double> rm(1, 2, 1, 1, 0.0), rv(1, 2, 1, 1, 1.0);
  const auto y = batch_norm<double>(x, scale, shift, rm, rv, Mode::kTrain, nullptr);
  const std::size_t count = 3 * 20;
  for (int c = 0; c < 2; ++c) {
    double mean = 0.0;
    double sq = 0.0;
    double xmean = 0.0;
    double xsq = 0.0;
    for (int n = 0; n < 3; ++n) {
      for (std::size_t i = 0; i < 20; ++i) {
        mean += y.plane(n, c)[i];
        sq += y.plane(n, c)[i] * y.plane(n, c)[i];
        xmean += x.plane(n, c)[i];
      }
    }
    mean /= count;
    xmean /= count;
    for (int n = 0; n < 3; ++n) {
      for (std::size_t i = 0; i < 20; ++i) {
        xsq += (x.plane(n, c)[i] - xmean) * (x.plane(n, c)[i] - xmean);
      }
    }
    const double biased = xsq / count;
    EXPECT_NEAR(mean, 0.0, 1e-12);
    EXPECT_NEAR(sq / count, biased / (biased + 1e-5), 1e-9);
    EXPECT_NEAR(rm.data()[c], 0.1 * xmean, 1e-12);
    EXPECT_NEAR(rv.data()[c], 0.9 + 0.1 * xsq / (count - 1), 1e-12);
  }
  // Inference uses the running statistics.
  const auto yi = batch_norm<double>(x, scale, shift, rm, rv, Mode::kInfer, nullptr);
  for (int c = 0; c < 2; ++c) {
    const double expect =
        (x(0, c, 1, 1) - rm.data()[c]) / std::sqrt(rv.data()[c] + 1e-5);
    EXPECT_NEAR(yi(0, c, 1, 1), expect, 1e-12);
  }
  Tensor<double> single(1, 2, 1, 1);
  EXPECT_THROW(batch_norm<double>(single, scale, shift, rm, rv, Mode::kTrain, nullptr),
               DimensionError);
}

TEST(Layers, MaxPoolTiesPickFirstElement) {
  Tensor<double> x(1, 1, 2, 4, 1.0);
  x(0, 0, 1, 3) = 2.0;
  std::vector<std::uint32_t> argmax;
  const auto y = max_pool2(x, &argmax);
  EXPECT_EQ(y(0, 0, 0, 0), 1.0);
  EXPECT_EQ(y(0, 0, 0, 1), 2.0);
  EXPECT_EQ(argmax[0], 0u);
  EXPECT_EQ(argmax[1], 7u);
  Tensor<double> g(1, 1, 1, 2, 1.0);
  const auto dx = max_pool2_backward(x, argmax, g);
  EXPECT_EQ(dx(0, 0, 0, 0), 1.0);
  EXPECT_EQ(dx(0, 0, 0, 1), 0.0);
  EXPECT_EQ(dx(0, 0, 1, 3), 1.0);
  EXPECT_THROW(max_pool2<double>(Tensor<double>(1, 1, 3, 4), nullptr), DimensionError);
}

TEST(Layers, ElementwiseOps) {
  Tensor<double> x(1, 1, 1, 3);
  x(0, 0, 0, 0) = -2.0;
  x(0, 0, 0, 1) = 0.0;
  x(0, 0, 0, 2) = 3.0;
  const auto r = leaky_relu(x, 0.01);
  EXPECT_DOUBLE_EQ(r(0, 0, 0, 0), -0.02);
  EXPECT_EQ(r(0, 0, 0, 2), 3.0);
  const auto s = sigmoid(x);
  EXPECT_DOUBLE_EQ(s(0, 0, 0, 1), 0.5);
  EXPECT_NEAR(s(0, 0, 0, 2), 1.0 / (1.0 + std::exp(-3.0)), 1e-15);

  std::mt19937_64 rng(4);
  auto a = random_tensor<double>(rng, 2, 2, 3, 3);
  auto b = random_tensor<double>(rng, 2, 3, 3, 3);
  const auto c = concat_channels(a, b);
  EXPECT_EQ(c.c(), 5);
  EXPECT_EQ(c(1, 3, 2, 1), b(1, 1, 2, 1));
  Tensor<double> ga, gb;
  split_channels(c, 2, ga, gb);
  expect_near(ga, a, 0.0);
  expect_near(gb, b, 0.0);
}

TEST(Layers, Losses) {
  Tensor<double> p(1, 1, 1, 2), t(1, 1, 1, 2);
  p(0, 0, 0, 0) = 0.25;
  p(0, 0, 0, 1) = 0.75;
  t(0, 0, 0, 0) = 0.0;
  t(0, 0, 0, 1) = 1.0;
  EXPECT_DOUBLE_EQ(loss(LossKind::kMse, p, t).value, 0.0625);
  EXPECT_NEAR(loss(LossKind::kBce, p, t).value, -std::log(0.75), 1e-15);
  p(0, 0, 0, 0) = 0.0;  // clamped: finite loss, zero gradient
  const auto clamped = loss(LossKind::kBce, p, t);
  EXPECT_TRUE(std::isfinite(clamped.value));
  EXPECT_EQ(clamped.grad(0, 0, 0, 0), 0.0);
  EXPECT_THROW(loss(LossKind::kMse, p, Tensor<double>(1, 1, 2, 1)), DimensionError);
}

TEST(GradientCheck, EveryLayer) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    EXPECT_LT(testing::check_conv2d(rng), 1e-3);
    EXPECT_LT(testing::check_conv2d(rng, 3), 1e-3);
    EXPECT_LT(testing::check_transposed_conv(rng), 1e-3);
    EXPECT_LT(testing::check_batch_norm(rng), 1e-3);
    EXPECT_LT(testing::check_leaky_relu(rng), 1e-3);
    EXPECT_LT(testing::check_max_pool(rng), 1e-3);
    EXPECT_LT(testing::check_loss(rng, LossKind::kMse), 1e-3);
    EXPECT_LT(testing::check_loss(rng, LossKind::kBce), 1e-3);
  }
}

TEST(GradientCheck, DepthOneUNet) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    const auto r = testing::check_unet(rng);
    EXPECT_LT(r.max_error, 1e-3);
    EXPECT_GT(r.checked, 2 * r.skipped) << r.skipped << " of " << r.checked + r.skipped;
  }
}

std::size_t expected_parameter_count(const UNetConfig& c) {
  auto conv = [&](int in, int out, int k) {
    return static_cast<std::size_t>(in) * out * k * k + out;
  };
  auto block = [&](int in, int out) {
    return conv(in, out, c.conv_kernel) + conv(out, out, c.conv_kernel) + 4u * out;
  };
  std::size_t n = 0;
  for (int l = 0; l < c.depth; ++l) {
    n += block(l == 0 ? c.input_channels : c.filters(l - 1), c.filters(l));
  }
  n += block(c.filters(c.depth - 1), c.filters(c.depth));
  for (int l = 0; l < c.depth; ++l) {
    n += conv(c.filters(l + 1), c.filters(l), 4);
    n += block(2 * c.filters(l), c.filters(l));
  }
  return n + conv(c.filters(0), 1, c.final_kernel);
}

TEST(UNet, LayoutAndShapes) {
  for (int depth : {1, 2, 3, 5}) {
    UNetConfig cfg;
    cfg.depth = depth;
    cfg.base_filters = 4;
    const UNet<float> net(cfg, 7);
    EXPECT_EQ(net.parameters().parameter_count(), expected_parameter_count(cfg));
    const int side = 1 << (depth + 1);
    const auto y = net.infer(Tensor<float>(2, 1, side, side, 0.3f));
    EXPECT_EQ(y.shape(), (std::array<int, 4>{2, 1, side, side}));
    for (float v : y.values()) {
      EXPECT_GT(v, 0.0f);
      EXPECT_LT(v, 1.0f);
    }
    EXPECT_THROW(net.infer(Tensor<float>(1, 1, side + 1, side)), DimensionError);
    EXPECT_THROW(net.infer(Tensor<float>(1, 2, side, side)), DimensionError);
  }
  EXPECT_EQ(he_init<float>(UNetConfig{}, 0).params.front().name, "enc0.0.conv.weight");
  EXPECT_EQ(he_init<float>(UNetConfig{}, 0).params.back().name, "final.bias");
  UNetConfig bad;
  bad.depth = 0;
  EXPECT_THROW(bad.validate(), ParameterError);
}

TEST(UNet, HeInitialisation) {
  UNetConfig cfg;
  cfg.depth = 2;
  cfg.base_filters = 16;
  const auto ps = he_init<double>(cfg, 3);
  for (const auto& p : ps.params) {
    const auto& s = p.value.shape();
    if (p.name.ends_with("bias") || p.name.ends_with("shift")) {
      for (double v : p.value.values()) EXPECT_EQ(v, 0.0);
    } else if (p.name.ends_with("scale")) {
      for (double v : p.value.values()) EXPECT_EQ(v, 1.0);
    } else if (p.value.size() > 4000) {
      const double fan_in = p.name.starts_with("up")
                                ? s[0] * 4.0
                                : static_cast<double>(s[1]) * s[2] * s[3];
      double sq = 0.0;
      for (double v : p.value.values()) sq += v * v;
      const double sd = std::sqrt(sq / p.value.size());
      EXPECT_NEAR(sd, std::sqrt(2.0 / fan_in), 0.05 * std::sqrt(2.0 / fan_in)) << p.name;
    }
  }
  const auto again = he_init<double>(cfg, 3);
  EXPECT_EQ(again.params[0].value.values()[5], ps.params[0].value.values()[5]);
}

TEST(UNet, AdamStepMatchesFormula) {
  UNetConfig cfg;
  cfg.depth = 1;
  cfg.base_filters = 1;
  auto ps = he_init<double>(cfg, 1);
  const auto before = ps;
  Gradients<double> g;
  std::mt19937_64 rng(9);
  for (const auto& p : ps.params) {
    const auto& s = p.value.shape();
    g.push_back(random_tensor<double>(rng, s[0], s[1], s[2], s[3]));
  }
  const AdamOptions opt{0.01};
  adam_step(ps, g, opt);
  adam_step(ps, g, opt);
  EXPECT_EQ(ps.step, 2);
  for (std::size_t i = 0; i < ps.params.size(); ++i) {
    for (std::size_t j = 0; j < g[i].size(); ++j) {
      const double gj = g[i].values()[j];
      double m = 0.1 * gj;
      double v = 0.001 * gj * gj;
      double w = before.params[i].value.values()[j];
      w -= 0.01 * (m / 0.1) / (std::sqrt(v / 0.001) + 1e-8);
      m = 0.9 * m + 0.1 * gj;
      v = 0.999 * v + 0.001 * gj * gj;
      w -= 0.01 * (m / (1 - 0.81)) / (std::sqrt(v / (1 - 0.999 * 0.999)) + 1e-8);
      ASSERT_NEAR(ps.params[i].value.values()[j], w, 1e-12);
    }
  }
  g.pop_back();
  EXPECT_THROW(adam_step(ps, g, opt), DimensionError);
}

TEST(UNet, TrainAndInferAgreeOnRunningStatistics) {
  UNetConfig cfg;
  cfg.depth = 2;
  cfg.base_filters = 2;
  UNet<double> net(cfg, 4);
  std::mt19937_64 rng(10);
  const auto x = random_tensor<double>(rng, 3, 1, 8, 8);
  const auto before = net.parameters().buffers;
  const auto a = net.evaluate(x, Mode::kTrain);
  EXPECT_EQ(net.parameters().buffers[0].values()[0], before[0].values()[0]);
  ForwardCache<double> cache;
  const auto b = net.forward_train(x, cache);
  expect_near(a, b, 0.0);
  EXPECT_NE(net.parameters().buffers[0].values()[0], before[0].values()[0]);
}

std::vector<Example<float>> toy_set(std::mt19937_64& rng, int n) {
  // Target: the input blurred toward its mean, easy to fit.
  std::vector<Example<float>> set;
  for (int i = 0; i < n; ++i) {
    auto x = random_tensor<float>(rng, 1, 1, 8, 8, 0.0, 1.0);
    Tensor<float> t(1, 1, 8, 8);
    for (std::size_t j = 0; j < x.size(); ++j) t.values()[j] = 0.5f * x.values()[j] + 0.25f;
    set.push_back({x, t});
  }
  return set;
}

TEST(Train, LossDecreasesAndRunIsDeterministic) {
  std::mt19937_64 rng(11);
  const auto train_set = toy_set(rng, 12);
  const auto val_set = toy_set(rng, 4);
  UNetConfig cfg;
  cfg.depth = 1;
  cfg.base_filters = 4;
  TrainConfig tc;
  tc.max_epochs = 15;
  tc.patience = 100;
  tc.seed = 3;
  const auto a = train<float>(cfg, train_set, val_set, tc);
  const auto b = train<float>(cfg, train_set, val_set, tc);
  ASSERT_EQ(a.history.size(), 15u);
  EXPECT_LT(a.history.back().train_loss, a.history.front().train_loss);
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    EXPECT_EQ(a.history[i].train_loss, b.history[i].train_loss);
    EXPECT_EQ(a.history[i].val_loss, b.history[i].val_loss);
  }
  EXPECT_DOUBLE_EQ(evaluate_loss(a.model, val_set, LossKind::kMse, 3), a.best_val_loss);
}

TEST(Train, EarlyStoppingHonoursPatience) {
  std::mt19937_64 rng(12);
  const auto train_set = toy_set(rng, 6);
  const auto val_set = toy_set(rng, 3);
  UNetConfig cfg;
  cfg.depth = 1;
  cfg.base_filters = 2;
  TrainConfig tc;
  tc.max_epochs = 400;
  tc.patience = 3;
  tc.learning_rate = 0.05;  // large steps make the validation loss stall quickly
  const auto r = train<float>(cfg, train_set, val_set, tc);
  ASSERT_LT(r.history.size(), 400u);
  EXPECT_EQ(static_cast<int>(r.history.size()), r.best_epoch + tc.patience);
  for (const auto& e : r.history) {
    if (e.epoch > r.best_epoch) {
      EXPECT_GE(e.val_loss, r.best_val_loss);
    }
  }
  TrainConfig bad;
  bad.batch_size = 0;
  EXPECT_THROW(train<float>(cfg, train_set, val_set, bad), ParameterError);
  EXPECT_THROW(train<float>(cfg, {}, val_set, tc), DatasetError);
}

TEST(Checkpoint, RoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "frontline_ckpt_test";
  std::filesystem::create_directories(dir);
  UNetConfig cfg;
  cfg.depth = 2;
  cfg.base_filters = 3;
  UNet<float> net(cfg, 12);
  ForwardCache<float> cache;
  std::mt19937_64 rng(13);
  const auto x = random_tensor<float>(rng, 2, 1, 8, 8);
  net.forward_train(x, cache);  // move the running statistics off their defaults
  net.mutable_parameters().step = 17;
  const auto path = dir / "model.ckpt";
  save_checkpoint(path, net, {{"stage", 2}});
  const LoadedModel loaded = load_checkpoint(path);
  EXPECT_EQ(loaded.model.config(), cfg);
  EXPECT_EQ(loaded.metadata.at("stage"), 2);
  EXPECT_EQ(loaded.model.parameters().step, 17);
  const auto a = net.infer(x);
  const auto b = loaded.model.infer(x);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.values()[i], b.values()[i]);

  std::string bytes = io::read_file(path);
  EXPECT_EQ(bytes.substr(0, kCheckpointMagic.size()), kCheckpointMagic);
  io::atomic_write(dir / "truncated.ckpt", bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(load_checkpoint(dir / "truncated.ckpt"), ModelError);
  bytes[0] = 'X';
  io::atomic_write(dir / "bad.ckpt", bytes);
  EXPECT_THROW(load_checkpoint(dir / "bad.ckpt"), ModelError);
  EXPECT_THROW(load_checkpoint(dir / "missing.ckpt"), ModelError);
  std::filesystem::remove_all(dir);
}

TEST(Train, PredictKeepsShapeAndDomain) {
  UNetConfig cfg;
  cfg.depth = 2;
  cfg.base_filters = 2;
  const UNet<float> net(cfg, 1);
  const Raster img(16, 8, Resolution::isotropic(20.0), ValueDomain::kIntensity01, 0.4);
  const Raster out = predict(net, img, ValueDomain::kDistance01);
  EXPECT_EQ(out.width(), 16);
  EXPECT_EQ(out.height(), 8);
  EXPECT_EQ(out.resolution(), img.resolution());
  EXPECT_EQ(out.domain(), ValueDomain::kDistance01);
}

}  // namespace
}  // namespace frontline::nn

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

#include "frontline/nn/layers.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <initializer_list>
#include <cmath>
#include <cstring>
#include <string>

namespace frontline::nn {

namespace {

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatrixMap = Eigen::Map<Matrix<T>>;
template <typename T>
using ConstMatrixMap = Eigen::Map<const Matrix<T>>;

template <typename T>
using StridedMap =
    Eigen::Map<const Matrix<T>, Eigen::Unaligned, Eigen::OuterStride<>>;
template <typename T>
using MutableStridedMap =
    Eigen::Map<Matrix<T>, Eigen::Unaligned, Eigen::OuterStride<>>;

// "Same" convolution as one small GEMM per kernel tap. Inputs are copied
// into planes padded by k/2 on every side; the output is computed on rows of
// the padded width, so every tap reads one contiguous run per channel. The
// extra columns are discarded (or kept at zero for gradients).
struct PaddedGeometry {
  int h = 0;
  int w = 0;
  int k = 0;
  int pad = 0;
  int pw = 0;              // padded width
  std::size_t plane = 0;   // padded plane size plus slack for the last tap
  std::size_t run = 0;     // h * pw, columns of each tap GEMM

  PaddedGeometry(int height, int width, int kernel)
      : h(height), w(width), k(kernel), pad(kernel / 2), pw(width + 2 * pad) {
    plane = static_cast<std::size_t>(h + 2 * pad) * pw + 2 * pad;
    run = static_cast<std::size_t>(h) * pw;
  }
  std::size_t tap_offset(int ky, int kx) const {
    return static_cast<std::size_t>(ky) * pw + kx;
  }
};

template <typename T>
void pad_planes(const T* x, int channels, const PaddedGeometry& g, T* out) {
  std::fill(out, out + g.plane * channels, T(0));
  for (int c = 0; c < channels; ++c) {
    const T* src = x + static_cast<std::size_t>(c) * g.h * g.w;
    T* dst = out + c * g.plane;
    for (int y = 0; y < g.h; ++y) {
      std::memcpy(dst + static_cast<std::size_t>(y + g.pad) * g.pw + g.pad,
                  src + static_cast<std::size_t>(y) * g.w, sizeof(T) * g.w);
    }
  }
}

// (Cout, Cin, k, k) -> k*k matrices of Cout x Cin.
template <typename T>
std::vector<Matrix<T>> split_taps(const Tensor<T>& weights) {
  const int cout = weights.n();
  const int cin = weights.c();
  const int k = weights.h();
  std::vector<Matrix<T>> taps(static_cast<std::size_t>(k) * k, Matrix<T>(cout, cin));
  for (int co = 0; co < cout; ++co) {
    for (int ci = 0; ci < cin; ++ci) {
      for (int t = 0; t < k * k; ++t) {
        taps[t](co, ci) = weights(co, ci, t / k, t % k);
      }
    }
  }
  return taps;
}

template <typename T>
void check_bias(const Tensor<T>& bias, int channels, const char* what) {
  if (bias.size() != static_cast<std::size_t>(channels)) {
    throw DimensionError(std::string(what) + ": bias has " +
                         std::to_string(bias.size()) + " entries, expected " +
                         std::to_string(channels));
  }
}

template <typename T>
void add_bias(Tensor<T>& y, const Tensor<T>& bias) {
  for (int n = 0; n < y.n(); ++n) {
    for (int c = 0; c < y.c(); ++c) {
      T* p = y.plane(n, c);
      const T b = bias.data()[c];
      for (std::size_t i = 0; i < y.plane_size(); ++i) p[i] += b;
    }
  }
}

template <typename T>
Tensor<T> bias_grad(const Tensor<T>& grad_out) {
  Tensor<T> db(1, grad_out.c(), 1, 1);
  for (int c = 0; c < grad_out.c(); ++c) {
    double acc = 0.0;
    for (int n = 0; n < grad_out.n(); ++n) {
      const T* p = grad_out.plane(n, c);
      for (std::size_t i = 0; i < grad_out.plane_size(); ++i) acc += p[i];
    }
    db.data()[c] = static_cast<T>(acc);
  }
  return db;
}

}  // namespace

template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& weights,
                 const Tensor<T>& bias) {
  const int k = weights.h();
  if (k % 2 == 0 || weights.w() != k) {
    throw DimensionError("conv2d needs a square odd kernel, got " +
                         weights.shape_string());
  }
  if (weights.c() != x.c()) {
    throw DimensionError("conv2d: input has " + std::to_string(x.c()) +
                         " channels, weights expect " +
                         std::to_string(weights.c()));
  }
  const int cin = x.c();
  const int cout = weights.n();
  check_bias(bias, cout, "conv2d");
  const PaddedGeometry g(x.h(), x.w(), k);
  const auto taps = split_taps(weights);
  Tensor<T> y(x.n(), cout, x.h(), x.w());
  std::vector<T> xp(g.plane * cin);
  Matrix<T> acc(cout, g.run);
  for (int n = 0; n < x.n(); ++n) {
    pad_planes(x.sample(n), cin, g, xp.data());
    acc.setZero();
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        StridedMap<T> xs(xp.data() + g.tap_offset(ky, kx), cin, g.run,
                         Eigen::OuterStride<>(static_cast<Eigen::Index>(g.plane)));
        acc.noalias() += taps[ky * k + kx] * xs;
      }
    }
    for (int co = 0; co < cout; ++co) {
      T* out = y.plane(n, co);
      for (int yy = 0; yy < g.h; ++yy) {
        std::memcpy(out + static_cast<std::size_t>(yy) * g.w,
                    acc.data() + co * g.run + static_cast<std::size_t>(yy) * g.pw,
                    sizeof(T) * g.w);
      }
    }
  }
  add_bias(y, bias);
  return y;
}

template <typename T>
ConvGrads<T> conv2d_backward(const Tensor<T>& x, const Tensor<T>& weights,
                             const Tensor<T>& grad_out) {
  const int k = weights.h();
  const int cin = x.c();
  const int cout = weights.n();
  if (grad_out.n() != x.n() || grad_out.c() != cout || grad_out.h() != x.h() ||
      grad_out.w() != x.w()) {
    throw DimensionError("conv2d_backward: gradient shape " +
                         grad_out.shape_string() + " does not match");
  }
  const PaddedGeometry g(x.h(), x.w(), k);
  const auto taps = split_taps(weights);
  ConvGrads<T> grads{Tensor<T>(x.n(), cin, x.h(), x.w()),
                     Tensor<T>(cout, cin, k, k), bias_grad(grad_out)};
  std::vector<Matrix<T>> dtaps(taps.size(), Matrix<T>::Zero(cout, cin));
  std::vector<T> xp(g.plane * cin);
  std::vector<T> dxp(g.plane * cin);
  // Output gradient laid out on padded-width rows; the extra columns stay 0.
  Matrix<T> dy = Matrix<T>::Zero(cout, g.run);
  for (int n = 0; n < x.n(); ++n) {
    pad_planes(x.sample(n), cin, g, xp.data());
    for (int co = 0; co < cout; ++co) {
      const T* src = grad_out.plane(n, co);
      for (int yy = 0; yy < g.h; ++yy) {
        std::memcpy(dy.data() + co * g.run + static_cast<std::size_t>(yy) * g.pw,
                    src + static_cast<std::size_t>(yy) * g.w, sizeof(T) * g.w);
      }
    }
    std::fill(dxp.begin(), dxp.end(), T(0));
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        const int t = ky * k + kx;
        const std::size_t off = g.tap_offset(ky, kx);
        const Eigen::OuterStride<> stride(static_cast<Eigen::Index>(g.plane));
        StridedMap<T> xs(xp.data() + off, cin, g.run, stride);
        dtaps[t].noalias() += dy * xs.transpose();
        MutableStridedMap<T> dxs(dxp.data() + off, cin, g.run, stride);
        dxs.noalias() += taps[t].transpose() * dy;
      }
    }
    for (int c = 0; c < cin; ++c) {
      T* dst = grads.input.plane(n, c);
      const T* src = dxp.data() + c * g.plane;
      for (int yy = 0; yy < g.h; ++yy) {
        std::memcpy(dst + static_cast<std::size_t>(yy) * g.w,
                    src + static_cast<std::size_t>(yy + g.pad) * g.pw + g.pad,
                    sizeof(T) * g.w);
      }
    }
  }
  for (int co = 0; co < cout; ++co) {
    for (int ci = 0; ci < cin; ++ci) {
      for (int t = 0; t < k * k; ++t) {
        grads.weights(co, ci, t / k, t % k) = dtaps[t](co, ci);
      }
    }
  }
  return grads;
}

namespace {

constexpr int kUpKernel = 4;
constexpr int kUpStride = 2;
constexpr int kUpPad = 1;

template <typename T>
void check_transposed(const Tensor<T>& x, const Tensor<T>& weights) {
  if (weights.h() != kUpKernel || weights.w() != kUpKernel) {
    throw DimensionError("transposed_conv2 needs a 4x4 kernel, got " +
                         weights.shape_string());
  }
  if (weights.n() != x.c()) {
    throw DimensionError("transposed_conv2: input has " +
                         std::to_string(x.c()) + " channels, weights expect " +
                         std::to_string(weights.n()));
  }
}

}  // namespace

template <typename T>
Tensor<T> transposed_conv2(const Tensor<T>& x, const Tensor<T>& weights,
                           const Tensor<T>& bias) {
  check_transposed(x, weights);
  const int cin = x.c();
  const int cout = weights.c();
  check_bias(bias, cout, "transposed_conv2");
  const int h = x.h();
  const int w = x.w();
  const int oh = h * kUpStride;
  const int ow = w * kUpStride;
  const int taps = cout * kUpKernel * kUpKernel;
  const std::size_t hw = static_cast<std::size_t>(h) * w;
  Tensor<T> y(x.n(), cout, oh, ow);
  std::vector<T> cols(static_cast<std::size_t>(taps) * hw);
  ConstMatrixMap<T> wm(weights.data(), cin, taps);
  for (int n = 0; n < x.n(); ++n) {
    ConstMatrixMap<T> xm(x.sample(n), cin, hw);
    MatrixMap<T> cm(cols.data(), taps, hw);
    cm.noalias() = wm.transpose() * xm;
    for (int co = 0; co < cout; ++co) {
      T* out = y.plane(n, co);
      for (int ky = 0; ky < kUpKernel; ++ky) {
        for (int kx = 0; kx < kUpKernel; ++kx) {
          const T* row =
              cols.data() + ((static_cast<std::size_t>(co) * kUpKernel + ky) *
                                 kUpKernel + kx) * hw;
          for (int iy = 0; iy < h; ++iy) {
            const int oy = iy * kUpStride - kUpPad + ky;
            if (oy < 0 || oy >= oh) continue;
            for (int ix = 0; ix < w; ++ix) {
              const int ox = ix * kUpStride - kUpPad + kx;
              if (ox < 0 || ox >= ow) continue;
              out[static_cast<std::size_t>(oy) * ow + ox] +=
                  row[static_cast<std::size_t>(iy) * w + ix];
            }
          }
        }
      }
    }
  }
  add_bias(y, bias);
  return y;
}

template <typename T>
ConvGrads<T> transposed_conv2_backward(const Tensor<T>& x,
                                       const Tensor<T>& weights,
                                       const Tensor<T>& grad_out) {
  check_transposed(x, weights);
  const int cin = x.c();
  const int cout = weights.c();
  const int h = x.h();
  const int w = x.w();
  const int oh = h * kUpStride;
  const int ow = w * kUpStride;
  if (grad_out.n() != x.n() || grad_out.c() != cout || grad_out.h() != oh ||
      grad_out.w() != ow) {
    throw DimensionError("transposed_conv2_backward: gradient shape " +
                         grad_out.shape_string() + " does not match");
  }
  const int taps = cout * kUpKernel * kUpKernel;
  const std::size_t hw = static_cast<std::size_t>(h) * w;
  ConvGrads<T> g{Tensor<T>(x.n(), cin, h, w),
                 Tensor<T>(cin, cout, kUpKernel, kUpKernel),
                 bias_grad(grad_out)};
  std::vector<T> gathered(static_cast<std::size_t>(taps) * hw);
  ConstMatrixMap<T> wm(weights.data(), cin, taps);
  MatrixMap<T> dw(g.weights.data(), cin, taps);
  for (int n = 0; n < x.n(); ++n) {
    for (int co = 0; co < cout; ++co) {
      const T* dy = grad_out.plane(n, co);
      for (int ky = 0; ky < kUpKernel; ++ky) {
        for (int kx = 0; kx < kUpKernel; ++kx) {
          T* row = gathered.data() +
                   ((static_cast<std::size_t>(co) * kUpKernel + ky) * kUpKernel +
                    kx) * hw;
          for (int iy = 0; iy < h; ++iy) {
            const int oy = iy * kUpStride - kUpPad + ky;
            for (int ix = 0; ix < w; ++ix) {
              const int ox = ix * kUpStride - kUpPad + kx;
              row[static_cast<std::size_t>(iy) * w + ix] =
                  (oy < 0 || oy >= oh || ox < 0 || ox >= ow)
                      ? T(0)
                      : dy[static_cast<std::size_t>(oy) * ow + ox];
            }
          }
        }
      }
    }
    ConstMatrixMap<T> gm(gathered.data(), taps, hw);
    ConstMatrixMap<T> xm(x.sample(n), cin, hw);
    MatrixMap<T> dx(g.input.sample(n), cin, hw);
    dx.noalias() = wm * gm;
    dw.noalias() += xm * gm.transpose();
  }
  return g;
}

template <typename T>
Tensor<T> batch_norm(const Tensor<T>& x, const Tensor<T>& scale,
                     const Tensor<T>& shift, Tensor<T>& running_mean,
                     Tensor<T>& running_var, Mode mode,
                     BatchNormCache<T>* cache,
                     const BatchNormOptions& options) {
  const int channels = x.c();
  const std::initializer_list<const Tensor<T>*> per_channel{
      &scale, &shift, &running_mean, &running_var};
  for (const Tensor<T>* t : per_channel) {
    if (t->size() != static_cast<std::size_t>(channels)) {
      throw DimensionError("batch_norm: per-channel tensor has wrong size");
    }
  }
  const std::size_t count = static_cast<std::size_t>(x.n()) * x.plane_size();
  Tensor<T> y(x.n(), x.c(), x.h(), x.w());
  if (mode == Mode::kInfer) {
    for (int c = 0; c < channels; ++c) {
      const double inv = 1.0 / std::sqrt(static_cast<double>(running_var.data()[c]) +
                                         options.epsilon);
      const double mean = running_mean.data()[c];
      const double a = scale.data()[c] * inv;
      const double b = shift.data()[c] - a * mean;
      for (int n = 0; n < x.n(); ++n) {
        const T* in = x.plane(n, c);
        T* out = y.plane(n, c);
        for (std::size_t i = 0; i < x.plane_size(); ++i) {
          out[i] = static_cast<T>(a * in[i] + b);
        }
      }
    }
    return y;
  }
  if (count < 2) {
    throw DimensionError("batch_norm: degenerate batch, a channel has " +
                         std::to_string(count) + " element(s) in train mode");
  }
  if (cache) {
    cache->normalized = Tensor<T>(x.n(), x.c(), x.h(), x.w());
    cache->inv_std.assign(channels, 0.0);
  }
  const double momentum = options.momentum;
  for (int c = 0; c < channels; ++c) {
    double sum = 0.0;
    for (int n = 0; n < x.n(); ++n) {
      const T* in = x.plane(n, c);
      for (std::size_t i = 0; i < x.plane_size(); ++i) sum += in[i];
    }
    const double mean = sum / count;
    double sq = 0.0;
    for (int n = 0; n < x.n(); ++n) {
      const T* in = x.plane(n, c);
      for (std::size_t i = 0; i < x.plane_size(); ++i) {
        const double d = in[i] - mean;
        sq += d * d;
      }
    }
    const double var = sq / count;
    const double inv = 1.0 / std::sqrt(var + options.epsilon);
    const double g = scale.data()[c];
    const double b = shift.data()[c];
    for (int n = 0; n < x.n(); ++n) {
      const T* in = x.plane(n, c);
      T* out = y.plane(n, c);
      T* xh = cache ? cache->normalized.plane(n, c) : nullptr;
      for (std::size_t i = 0; i < x.plane_size(); ++i) {
        const double nrm = (in[i] - mean) * inv;
        if (xh) xh[i] = static_cast<T>(nrm);
        out[i] = static_cast<T>(g * nrm + b);
      }
    }
    if (cache) cache->inv_std[c] = inv;
    T& rm = running_mean.data()[c];
    T& rv = running_var.data()[c];
    rm = static_cast<T>(momentum * rm + (1.0 - momentum) * mean);
    rv = static_cast<T>(momentum * rv +
                        (1.0 - momentum) * var * count / (count - 1.0));
  }
  return y;
}

template <typename T>
BatchNormGrads<T> batch_norm_backward(const BatchNormCache<T>& cache,
                                      const Tensor<T>& scale,
                                      const Tensor<T>& grad_out) {
  const Tensor<T>& xh = cache.normalized;
  require_same_shape(xh, grad_out, "batch_norm_backward");
  const int channels = xh.c();
  const double count = static_cast<double>(xh.n()) * xh.plane_size();
  BatchNormGrads<T> g{Tensor<T>(xh.n(), xh.c(), xh.h(), xh.w()),
                      Tensor<T>(1, channels, 1, 1), Tensor<T>(1, channels, 1, 1)};
  for (int c = 0; c < channels; ++c) {
    double sum_dy = 0.0;
    double sum_dy_xh = 0.0;
    for (int n = 0; n < xh.n(); ++n) {
      const T* dy = grad_out.plane(n, c);
      const T* x = xh.plane(n, c);
      for (std::size_t i = 0; i < xh.plane_size(); ++i) {
        sum_dy += dy[i];
        sum_dy_xh += static_cast<double>(dy[i]) * x[i];
      }
    }
    g.shift.data()[c] = static_cast<T>(sum_dy);
    g.scale.data()[c] = static_cast<T>(sum_dy_xh);
    const double gamma = scale.data()[c];
    const double k = gamma * cache.inv_std[c] / count;
    for (int n = 0; n < xh.n(); ++n) {
      const T* dy = grad_out.plane(n, c);
      const T* x = xh.plane(n, c);
      T* dx = g.input.plane(n, c);
      for (std::size_t i = 0; i < xh.plane_size(); ++i) {
        dx[i] = static_cast<T>(k * (count * dy[i] - sum_dy - x[i] * sum_dy_xh));
      }
    }
  }
  return g;
}

template <typename T>
Tensor<T> leaky_relu(const Tensor<T>& x, double slope) {
  Tensor<T> y = x;
  const T s = static_cast<T>(slope);
  for (T& v : y.values()) v = v > T(0) ? v : s * v;
  return y;
}

template <typename T>
Tensor<T> leaky_relu_backward(const Tensor<T>& x, const Tensor<T>& grad_out,
                              double slope) {
  require_same_shape(x, grad_out, "leaky_relu_backward");
  Tensor<T> g = grad_out;
  const T s = static_cast<T>(slope);
  auto xv = x.values();
  auto gv = g.values();
  for (std::size_t i = 0; i < gv.size(); ++i) {
    if (!(xv[i] > T(0))) gv[i] *= s;
  }
  return g;
}

template <typename T>
Tensor<T> max_pool2(const Tensor<T>& x, std::vector<std::uint32_t>* argmax) {
  if (x.h() % 2 != 0 || x.w() % 2 != 0) {
    throw DimensionError("max_pool2 needs even spatial dimensions, got " +
                         x.shape_string());
  }
  const int oh = x.h() / 2;
  const int ow = x.w() / 2;
  Tensor<T> y(x.n(), x.c(), oh, ow);
  if (argmax) argmax->assign(y.size(), 0);
  std::size_t o = 0;
  for (int n = 0; n < x.n(); ++n) {
    for (int c = 0; c < x.c(); ++c) {
      const T* in = x.plane(n, c);
      const std::size_t base = in - x.data();
      for (int y0 = 0; y0 < oh; ++y0) {
        for (int x0 = 0; x0 < ow; ++x0, ++o) {
          std::size_t best = static_cast<std::size_t>(2 * y0) * x.w() + 2 * x0;
          for (int dy = 0; dy < 2; ++dy) {
            for (int dx = 0; dx < 2; ++dx) {
              const std::size_t idx =
                  static_cast<std::size_t>(2 * y0 + dy) * x.w() + 2 * x0 + dx;
              if (in[idx] > in[best]) best = idx;
            }
          }
          y.data()[o] = in[best];
          if (argmax) (*argmax)[o] = static_cast<std::uint32_t>(base + best);
        }
      }
    }
  }
  return y;
}

template <typename T>
Tensor<T> max_pool2_backward(const Tensor<T>& x,
                             const std::vector<std::uint32_t>& argmax,
                             const Tensor<T>& grad_out) {
  if (argmax.size() != grad_out.size()) {
    throw DimensionError("max_pool2_backward: argmax size mismatch");
  }
  Tensor<T> g(x.n(), x.c(), x.h(), x.w());
  for (std::size_t i = 0; i < argmax.size(); ++i) {
    g.data()[argmax[i]] += grad_out.data()[i];
  }
  return g;
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& x) {
  Tensor<T> y = x;
  for (T& v : y.values()) v = T(1) / (T(1) + std::exp(-v));
  return y;
}

template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.n() != b.n() || a.h() != b.h() || a.w() != b.w()) {
    throw DimensionError("concat_channels: " + a.shape_string() + " vs " +
                         b.shape_string());
  }
  Tensor<T> y(a.n(), a.c() + b.c(), a.h(), a.w());
  const std::size_t pa = a.c() * a.plane_size();
  const std::size_t pb = b.c() * b.plane_size();
  for (int n = 0; n < a.n(); ++n) {
    std::copy(a.sample(n), a.sample(n) + pa, y.sample(n));
    std::copy(b.sample(n), b.sample(n) + pb, y.sample(n) + pa);
  }
  return y;
}

template <typename T>
void split_channels(const Tensor<T>& g, int channels_a, Tensor<T>& ga,
                    Tensor<T>& gb) {
  const int cb = g.c() - channels_a;
  ga = Tensor<T>(g.n(), channels_a, g.h(), g.w());
  gb = Tensor<T>(g.n(), cb, g.h(), g.w());
  const std::size_t pa = channels_a * g.plane_size();
  const std::size_t pb = cb * g.plane_size();
  for (int n = 0; n < g.n(); ++n) {
    std::copy(g.sample(n), g.sample(n) + pa, ga.sample(n));
    std::copy(g.sample(n) + pa, g.sample(n) + pa + pb, gb.sample(n));
  }
}

template <typename T>
LossResult<T> loss(LossKind kind, const Tensor<T>& pred,
                   const Tensor<T>& target) {
  require_same_shape(pred, target, "loss");
  LossResult<T> r{0.0, Tensor<T>(pred.n(), pred.c(), pred.h(), pred.w())};
  const double n = static_cast<double>(pred.size());
  if (n == 0) throw DimensionError("loss of an empty tensor");
  auto p = pred.values();
  auto t = target.values();
  auto g = r.grad.values();
  double acc = 0.0;
  if (kind == LossKind::kMse) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double d = static_cast<double>(p[i]) - t[i];
      acc += d * d;
      g[i] = static_cast<T>(2.0 * d / n);
    }
  } else {
    constexpr double kClamp = 1e-7;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double raw = p[i];
      const double pc = std::clamp(raw, kClamp, 1.0 - kClamp);
      const double tv = t[i];
      acc -= tv * std::log(pc) + (1.0 - tv) * std::log(1.0 - pc);
      const bool clamped = raw < kClamp || raw > 1.0 - kClamp;
      g[i] = clamped ? T(0)
                     : static_cast<T>(-(tv / pc - (1.0 - tv) / (1.0 - pc)) / n);
    }
  }
  r.value = acc / n;
  return r;
}

#define FRONTLINE_INSTANTIATE_LAYERS(T)                                        \
  template Tensor<T> conv2d(const Tensor<T>&, const Tensor<T>&,                \
                            const Tensor<T>&);                                 \
  template ConvGrads<T> conv2d_backward(const Tensor<T>&, const Tensor<T>&,    \
                                        const Tensor<T>&);                     \
  template Tensor<T> transposed_conv2(const Tensor<T>&, const Tensor<T>&,      \
                                      const Tensor<T>&);                       \
  template ConvGrads<T> transposed_conv2_backward(                             \
      const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);                   \
  template Tensor<T> batch_norm(const Tensor<T>&, const Tensor<T>&,            \
                                const Tensor<T>&, Tensor<T>&, Tensor<T>&,      \
                                Mode, BatchNormCache<T>*,                      \
                                const BatchNormOptions&);                      \
  template BatchNormGrads<T> batch_norm_backward(                              \
      const BatchNormCache<T>&, const Tensor<T>&, const Tensor<T>&);           \
  template Tensor<T> leaky_relu(const Tensor<T>&, double);                     \
  template Tensor<T> leaky_relu_backward(const Tensor<T>&, const Tensor<T>&,   \
                                         double);                              \
  template Tensor<T> max_pool2(const Tensor<T>&, std::vector<std::uint32_t>*); \
  template Tensor<T> max_pool2_backward(                                       \
      const Tensor<T>&, const std::vector<std::uint32_t>&, const Tensor<T>&);  \
  template Tensor<T> sigmoid(const Tensor<T>&);                                \
  template Tensor<T> concat_channels(const Tensor<T>&, const Tensor<T>&);      \
  template void split_channels(const Tensor<T>&, int, Tensor<T>&, Tensor<T>&); \
  template LossResult<T> loss(LossKind, const Tensor<T>&, const Tensor<T>&);

FRONTLINE_INSTANTIATE_LAYERS(float)
FRONTLINE_INSTANTIATE_LAYERS(double)

#undef FRONTLINE_INSTANTIATE_LAYERS

}  // namespace frontline::nn

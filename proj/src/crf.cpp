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

#include "frontline/crf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "frontline/error.hpp"

namespace frontline {

std::string_view to_string(CrfNormalization n) {
  return n == CrfNormalization::kNone ? "none" : "symmetric";
}

CrfNormalization crf_normalization_from_string(std::string_view name) {
  if (name == "none") return CrfNormalization::kNone;
  if (name == "symmetric") return CrfNormalization::kSymmetric;
  throw ParameterError("unknown CRF normalization '" + std::string(name) + "'");
}

void DenseCrfParams::validate() const {
  if (!(w1 >= 0.0) || !(w2 >= 0.0)) {
    throw ParameterError("CRF kernel weights must be non-negative");
  }
  if (!(sigma_alpha > 0.0) || !(sigma_beta > 0.0) || !(sigma_gamma > 0.0)) {
    throw ParameterError("CRF kernel scales must be positive");
  }
  if (iterations < 1) throw ParameterError("CRF needs at least one iteration");
  if (window && *window < 1) throw ParameterError("CRF window must be >= 1");
}

LabelDistribution::LabelDistribution(int width, int height)
    : width_(width), height_(height),
      q_(static_cast<std::size_t>(width) * height, {0.5, 0.5}) {
  if (width < 1 || height < 1) {
    throw DimensionError("label distribution needs positive dimensions");
  }
}

double LabelDistribution::max_normalization_error() const {
  double worst = 0.0;
  for (const auto& p : q_) {
    if (p[0] < 0.0 || p[1] < 0.0) {
      worst = std::max(worst, 1.0 - std::min(p[0], p[1]));
    }
    worst = std::max(worst, std::abs(p[0] + p[1] - 1.0));
  }
  return worst;
}

LabelDistribution LabelDistribution::swapped() const {
  LabelDistribution out = *this;
  for (auto& p : out.q_) std::swap(p[0], p[1]);
  return out;
}

LabelDistribution unary_from_distance_map(const Raster& dmap, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    throw ParameterError("unary epsilon must lie in (0, 0.5)");
  }
  LabelDistribution out(dmap.width(), dmap.height());
  const auto px = dmap.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    const double v = px[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw DomainError("distance map value " + std::to_string(v) +
                        " outside [0,1]");
    }
    const double front = std::clamp(v, epsilon, 1.0 - epsilon);
    out[i] = {front, 1.0 - front};
  }
  return out;
}

std::vector<std::array<double, 2>> unary_energy(const LabelDistribution& p) {
  std::vector<std::array<double, 2>> e(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    e[i] = {-std::log(p[i][0]), -std::log(p[i][1])};
  }
  return e;
}

LabelDistribution softmax_of_negated(
    int width, int height, const std::vector<std::array<double, 2>>& energy) {
  LabelDistribution q(width, height);
  if (energy.size() != q.size()) {
    throw DimensionError("energy size does not match dimensions");
  }
  for (std::size_t i = 0; i < energy.size(); ++i) {
    const double a = -energy[i][0];
    const double b = -energy[i][1];
    const double m = std::max(a, b);
    const double ea = std::exp(a - m);
    const double eb = std::exp(b - m);
    const double z = ea + eb;
    q[i] = {ea / z, eb / z};
  }
  return q;
}

namespace {

std::vector<double> spatial_table(int n, double sigma) {
  std::vector<double> t(n);
  for (int d = 0; d < n; ++d) {
    t[d] = std::exp(-0.5 * static_cast<double>(d) * d / (sigma * sigma));
  }
  return t;
}

// Accumulates Potts messages for every pixel. Each message is a sum over the
// other pixels in a fixed (row-major) order.
class PairwiseKernel {
 public:
  PairwiseKernel(const Raster& image, const DenseCrfParams& params)
      : image_(image), params_(params), w_(image.width()), h_(image.height()) {
    const int n = std::max(w_, h_);
    alpha_ = spatial_table(n, params.sigma_alpha);
    gamma_ = spatial_table(n, params.sigma_gamma);
    inv_two_beta_sq_ = 0.5 / (params.sigma_beta * params.sigma_beta);
    const std::size_t pixels = image.size();
    if (params.window) {
      radius_ = *params.window;
    } else if (pixels <= static_cast<std::size_t>(DenseCrfParams::kExactPixelLimit)) {
      radius_ = n;
    } else {
      radius_ = static_cast<int>(
          std::ceil(3.0 * std::max(params.sigma_alpha, params.sigma_gamma)));
    }
    if (params.normalization == CrfNormalization::kSymmetric) {
      inv_sqrt_mass_ = kernel_masses();
    }
    if (radius_ >= n && pixels * pixels <= kMaxCachedPairs) {
      cache_.resize(pixels * pixels);
      for (std::size_t i = 0; i < pixels; ++i) {
        for (std::size_t j = 0; j < pixels; ++j) {
          cache_[i * pixels + j] = i == j ? 0.0 : evaluate(i, j);
        }
      }
    }
  }

  void messages(const LabelDistribution& q,
                std::vector<std::array<double, 2>>& m) const {
    const std::size_t pixels = image_.size();
    m.assign(pixels, {0.0, 0.0});
    if (!cache_.empty()) {
      for (std::size_t i = 0; i < pixels; ++i) {
        const double* row = cache_.data() + i * pixels;
        double a = 0.0;
        double b = 0.0;
        for (std::size_t j = 0; j < pixels; ++j) {
          a += row[j] * q[j][0];
          b += row[j] * q[j][1];
        }
        m[i] = {a, b};
      }
      return;
    }
    for_each_pair([&](std::size_t i, std::size_t j) {
      const double k = evaluate(i, j);
      m[i][0] += k * q[j][0];
      m[i][1] += k * q[j][1];
    });
  }

 private:
  static constexpr std::size_t kMaxCachedPairs = 32u * 1024u * 1024u;

  // Visits (i, j), j != i, within the window, rows of i in row-major order.
  template <typename F>
  void for_each_pair(F&& f) const {
    for (int y = 0; y < h_; ++y) {
      const int y0 = std::max(0, y - radius_);
      const int y1 = std::min(h_ - 1, y + radius_);
      for (int x = 0; x < w_; ++x) {
        const int x0 = std::max(0, x - radius_);
        const int x1 = std::min(w_ - 1, x + radius_);
        const std::size_t i = static_cast<std::size_t>(y) * w_ + x;
        for (int yy = y0; yy <= y1; ++yy) {
          for (int xx = x0; xx <= x1; ++xx) {
            const std::size_t j = static_cast<std::size_t>(yy) * w_ + xx;
            if (j != i) f(i, j);
          }
        }
      }
    }
  }

  // 1 / sqrt(d_i) per kernel; zero where a pixel has no neighbours.
  std::vector<std::array<double, 2>> kernel_masses() const {
    std::vector<std::array<double, 2>> d(image_.size(), {0.0, 0.0});
    for_each_pair([&](std::size_t i, std::size_t j) {
      const auto g = kernels(i, j);
      d[i][0] += g[0];
      d[i][1] += g[1];
    });
    for (auto& v : d) {
      for (double& c : v) c = c > 0.0 ? 1.0 / std::sqrt(c) : 0.0;
    }
    return d;
  }

  // Unweighted bilateral and Gaussian kernels.
  std::array<double, 2> kernels(std::size_t i, std::size_t j) const {
    const int xi = static_cast<int>(i % w_);
    const int yi = static_cast<int>(i / w_);
    const int xj = static_cast<int>(j % w_);
    const int yj = static_cast<int>(j / w_);
    const int dx = std::abs(xi - xj);
    const int dy = std::abs(yi - yj);
    std::array<double, 2> g{0.0, 0.0};
    if (params_.w1 > 0.0) {
      const double di = image_.pixels()[i] - image_.pixels()[j];
      g[0] = alpha_[dx] * alpha_[dy] * std::exp(-di * di * inv_two_beta_sq_);
    }
    if (params_.w2 > 0.0) g[1] = gamma_[dx] * gamma_[dy];
    return g;
  }

  double evaluate(std::size_t i, std::size_t j) const {
    const auto g = kernels(i, j);
    if (inv_sqrt_mass_.empty()) return params_.w1 * g[0] + params_.w2 * g[1];
    const auto& ni = inv_sqrt_mass_[i];
    const auto& nj = inv_sqrt_mass_[j];
    return params_.w1 * g[0] * ni[0] * nj[0] + params_.w2 * g[1] * ni[1] * nj[1];
  }

  const Raster& image_;
  const DenseCrfParams& params_;
  int w_;
  int h_;
  int radius_ = 0;
  std::vector<double> alpha_;
  std::vector<double> gamma_;
  double inv_two_beta_sq_ = 0.0;
  std::vector<std::array<double, 2>> inv_sqrt_mass_;
  std::vector<double> cache_;
};

}  // namespace

LabelDistribution mean_field_infer(const LabelDistribution& unary,
                                   const Raster& image,
                                   const DenseCrfParams& params,
                                   const IterationObserver& observer) {
  params.validate();
  if (unary.width() != image.width() || unary.height() != image.height()) {
    throw DimensionError("unary and image dimensions differ");
  }
  const auto energy = unary_energy(unary);
  LabelDistribution q = softmax_of_negated(unary.width(), unary.height(), energy);
  const bool pairwise = params.w1 > 0.0 || params.w2 > 0.0;
  if (!pairwise) {
    if (observer) {
      for (int it = 1; it <= params.iterations; ++it) observer(it, q);
    }
    return q;
  }
  const PairwiseKernel kernel(image, params);
  std::vector<std::array<double, 2>> m;
  std::vector<std::array<double, 2>> total(energy.size());
  for (int it = 1; it <= params.iterations; ++it) {
    kernel.messages(q, m);
    // Potts: label l pays for the mass its neighbours put on the other label.
    for (std::size_t i = 0; i < energy.size(); ++i) {
      total[i] = {energy[i][0] + m[i][1], energy[i][1] + m[i][0]};
    }
    q = softmax_of_negated(unary.width(), unary.height(), total);
    if (observer) observer(it, q);
  }
  return q;
}

BinaryMask map_labels(const LabelDistribution& q) {
  BinaryMask out(q.width(), q.height());
  for (std::size_t i = 0; i < q.size(); ++i) {
    out.mutable_bits()[i] = q[i][0] > q[i][1] ? 1 : 0;
  }
  return out;
}

}  // namespace frontline

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

#include "frontline/raster.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "frontline/error.hpp"

namespace frontline {

double Resolution::geometric_mean() const { return std::sqrt(x * y); }

std::string_view to_string(ValueDomain domain) {
  switch (domain) {
    case ValueDomain::kIntensity01: return "intensity01";
    case ValueDomain::kDistance01: return "distance01";
    case ValueDomain::kProbability01: return "probability01";
    case ValueDomain::kRaw: return "raw";
  }
  return "raw";
}

ValueDomain value_domain_from_string(std::string_view name) {
  if (name == "intensity01") return ValueDomain::kIntensity01;
  if (name == "distance01") return ValueDomain::kDistance01;
  if (name == "probability01") return ValueDomain::kProbability01;
  if (name == "raw") return ValueDomain::kRaw;
  throw ParameterError("unknown value domain '" + std::string(name) + "'");
}

namespace {

void check_dimensions(int width, int height) {
  if (width < 1 || height < 1) {
    throw DimensionError("raster dimensions must be positive, got " +
                         std::to_string(width) + "x" + std::to_string(height));
  }
}

void check_resolution(const Resolution& r) {
  if (!(r.x > 0.0) || !(r.y > 0.0) || !std::isfinite(r.x) ||
      !std::isfinite(r.y)) {
    throw DomainError("resolution must be positive and finite");
  }
}

bool is_unit_domain(ValueDomain d) { return d != ValueDomain::kRaw; }

}  // namespace

Raster::Raster(int width, int height, Resolution resolution,
               ValueDomain domain, double fill)
    : width_(width), height_(height), resolution_(resolution),
      domain_(domain) {
  check_dimensions(width, height);
  check_resolution(resolution);
  pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

Raster::Raster(int width, int height, std::vector<double> pixels,
               Resolution resolution, ValueDomain domain)
    : width_(width), height_(height), pixels_(std::move(pixels)),
      resolution_(resolution), domain_(domain) {
  validate();
}

void Raster::set_resolution(Resolution resolution) {
  check_resolution(resolution);
  resolution_ = resolution;
}

void Raster::validate() const {
  check_dimensions(width_, height_);
  check_resolution(resolution_);
  if (pixels_.size() != static_cast<std::size_t>(width_) * height_) {
    throw DimensionError("pixel count does not match width x height");
  }
  if (is_unit_domain(domain_)) {
    for (double v : pixels_) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw DomainError("pixel value " + std::to_string(v) +
                          " outside [0,1] for domain " +
                          std::string(to_string(domain_)));
      }
    }
  }
}

BinaryMask::BinaryMask(int width, int height, Resolution resolution,
                       bool fill)
    : width_(width), height_(height), resolution_(resolution) {
  if (width < 0 || height < 0) {
    throw DimensionError("mask dimensions must be non-negative");
  }
  bits_.assign(static_cast<std::size_t>(width) * height, fill ? 1 : 0);
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(
      std::count_if(bits_.begin(), bits_.end(), [](auto b) { return b; }));
}

BinaryMask operator!(const BinaryMask& mask) {
  BinaryMask out = mask;
  for (auto& b : out.mutable_bits()) b = b ? 0 : 1;
  return out;
}

namespace {

template <typename Op>
BinaryMask combine(const BinaryMask& a, const BinaryMask& b, Op op) {
  if (!a.same_shape(b)) throw DimensionError("mask shapes differ");
  BinaryMask out(a.width(), a.height(), a.resolution());
  auto ab = a.bits();
  auto bb = b.bits();
  auto ob = out.mutable_bits();
  for (std::size_t i = 0; i < ob.size(); ++i) {
    ob[i] = op(ab[i] != 0, bb[i] != 0) ? 1 : 0;
  }
  return out;
}

}  // namespace

BinaryMask operator&(const BinaryMask& a, const BinaryMask& b) {
  return combine(a, b, [](bool x, bool y) { return x && y; });
}

BinaryMask operator|(const BinaryMask& a, const BinaryMask& b) {
  return combine(a, b, [](bool x, bool y) { return x || y; });
}

bool is_subset(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_shape(b)) throw DimensionError("mask shapes differ");
  auto ab = a.bits();
  auto bb = b.bits();
  for (std::size_t i = 0; i < ab.size(); ++i) {
    if (ab[i] && !bb[i]) return false;
  }
  return true;
}

Raster normalize_from_u16(std::span<const std::uint16_t> samples, int width,
                          int height, Resolution resolution) {
  if (samples.empty() || width < 1 || height < 1) {
    throw DimensionError("empty 16-bit grid");
  }
  if (samples.size() != static_cast<std::size_t>(width) * height) {
    throw DimensionError("16-bit sample count does not match dimensions");
  }
  std::vector<double> pixels(samples.size());
  std::transform(samples.begin(), samples.end(), pixels.begin(),
                 [](std::uint16_t v) { return v / 65535.0; });
  return Raster(width, height, std::move(pixels), resolution,
                ValueDomain::kIntensity01);
}

namespace {

double catmull_rom(double t) {
  constexpr double a = -0.5;
  t = std::abs(t);
  if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
  return 0.0;
}

// Interpolation taps for one output coordinate along one axis.
struct Taps {
  std::array<int, 4> index{};
  std::array<double, 4> weight{};
  int count = 0;
};

std::vector<Taps> axis_taps(int in, int out, Interpolation method) {
  std::vector<Taps> taps(out);
  const double scale = static_cast<double>(in) / out;
  for (int i = 0; i < out; ++i) {
    const double src = (i + 0.5) * scale - 0.5;
    Taps& t = taps[i];
    if (method == Interpolation::kBilinear) {
      const double clamped = std::clamp(src, 0.0, static_cast<double>(in - 1));
      const int i0 = static_cast<int>(std::floor(clamped));
      const int i1 = std::min(i0 + 1, in - 1);
      const double f = clamped - i0;
      t.index = {i0, i1, 0, 0};
      t.weight = {1.0 - f, f, 0.0, 0.0};
      t.count = 2;
    } else {
      const int base = static_cast<int>(std::floor(src));
      const double f = src - base;
      for (int k = 0; k < 4; ++k) {
        t.index[k] = std::clamp(base - 1 + k, 0, in - 1);
        t.weight[k] = catmull_rom(f - (k - 1));
      }
      t.count = 4;
    }
  }
  return taps;
}

}  // namespace

Raster resize(const Raster& image, int width, int height,
              Interpolation method) {
  if (image.empty()) throw DimensionError("cannot resize an empty raster");
  if (width < 1 || height < 1) {
    throw DimensionError("resize target dimensions must be positive");
  }
  const auto xt = axis_taps(image.width(), width, method);
  const auto yt = axis_taps(image.height(), height, method);

  // Separable: rows first into a width x in_height buffer, then columns.
  std::vector<double> tmp(static_cast<std::size_t>(width) * image.height());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < width; ++x) {
      const Taps& t = xt[x];
      double acc = 0.0;
      for (int k = 0; k < t.count; ++k) acc += t.weight[k] * image(t.index[k], y);
      tmp[static_cast<std::size_t>(y) * width + x] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    const Taps& t = yt[y];
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int k = 0; k < t.count; ++k) {
        acc += t.weight[k] * tmp[static_cast<std::size_t>(t.index[k]) * width + x];
      }
      out[static_cast<std::size_t>(y) * width + x] = acc;
    }
  }
  if (image.domain() != ValueDomain::kRaw) {
    for (double& v : out) v = std::clamp(v, 0.0, 1.0);
  }
  const Resolution res{
      image.resolution().x * image.width() / static_cast<double>(width),
      image.resolution().y * image.height() / static_cast<double>(height)};
  return Raster(width, height, std::move(out), res, image.domain());
}

BinaryMask resize_mask(const BinaryMask& mask, int width, int height) {
  if (width < 1 || height < 1) {
    throw DimensionError("resize target dimensions must be positive");
  }
  if (mask.width() < 1 || mask.height() < 1) {
    throw DimensionError("cannot resize an empty mask");
  }
  const double sx = static_cast<double>(mask.width()) / width;
  const double sy = static_cast<double>(mask.height()) / height;
  BinaryMask out(width, height,
                 {mask.resolution().x * sx, mask.resolution().y * sy});
  for (int y = 0; y < height; ++y) {
    const int src_y = std::min(static_cast<int>(std::floor(y * sy)),
                               mask.height() - 1);
    for (int x = 0; x < width; ++x) {
      const int src_x = std::min(static_cast<int>(std::floor(x * sx)),
                                 mask.width() - 1);
      out.set(x, y, mask(src_x, src_y));
    }
  }
  return out;
}

}  // namespace frontline

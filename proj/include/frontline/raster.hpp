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

#ifndef FRONTLINE_RASTER_HPP_
#define FRONTLINE_RASTER_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace frontline {

// Ground sampling distance in meters per pixel. Kept per axis so that
// anisotropic resizes stay exact; most callers use geometric_mean().
struct Resolution {
  double x = 1.0;
  double y = 1.0;

  static Resolution isotropic(double meters) { return {meters, meters}; }
  double geometric_mean() const;
  bool operator==(const Resolution&) const = default;
};

enum class ValueDomain { kIntensity01, kDistance01, kProbability01, kRaw };

std::string_view to_string(ValueDomain domain);
ValueDomain value_domain_from_string(std::string_view name);

// Single-channel row-major image of doubles. Tagged domains other than
// kRaw guarantee every pixel lies in [0, 1].
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, Resolution resolution = {},
         ValueDomain domain = ValueDomain::kRaw, double fill = 0.0);
  Raster(int width, int height, std::vector<double> pixels,
         Resolution resolution, ValueDomain domain);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return pixels_.size(); }
  bool empty() const { return pixels_.empty(); }
  const Resolution& resolution() const { return resolution_; }
  ValueDomain domain() const { return domain_; }

  double operator()(int x, int y) const {
    return pixels_[static_cast<std::size_t>(y) * width_ + x];
  }
  double& at(int x, int y) {
    return pixels_[static_cast<std::size_t>(y) * width_ + x];
  }
  std::span<const double> pixels() const { return pixels_; }
  std::span<double> mutable_pixels() { return pixels_; }

  void set_domain(ValueDomain domain) { domain_ = domain; }
  void set_resolution(Resolution resolution);

  // Throws DomainError / DimensionError when an invariant is broken.
  void validate() const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> pixels_;
  Resolution resolution_{};
  ValueDomain domain_ = ValueDomain::kRaw;
};

class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height, Resolution resolution = {},
             bool fill = false);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return bits_.size(); }
  const Resolution& resolution() const { return resolution_; }
  void set_resolution(Resolution resolution) { resolution_ = resolution; }

  bool operator()(int x, int y) const {
    return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }
  // Out-of-bounds reads return `outside`.
  bool get(int x, int y, bool outside = false) const {
    if (x < 0 || y < 0 || x >= width_ || y >= height_) return outside;
    return (*this)(x, y);
  }
  void set(int x, int y, bool value) {
    bits_[static_cast<std::size_t>(y) * width_ + x] = value ? 1 : 0;
  }
  std::span<const std::uint8_t> bits() const { return bits_; }
  std::span<std::uint8_t> mutable_bits() { return bits_; }

  std::size_t count() const;
  bool any() const { return count() > 0; }
  bool same_shape(const BinaryMask& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  // Pixel equality only; resolution is metadata.
  bool operator==(const BinaryMask& other) const {
    return width_ == other.width_ && height_ == other.height_ &&
           bits_ == other.bits_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
  Resolution resolution_{};
};

BinaryMask operator!(const BinaryMask& mask);
BinaryMask operator&(const BinaryMask& a, const BinaryMask& b);
BinaryMask operator|(const BinaryMask& a, const BinaryMask& b);
// a ⊆ b
bool is_subset(const BinaryMask& a, const BinaryMask& b);

// Maps 16-bit samples to [0, 1] by dividing by 65535.
Raster normalize_from_u16(std::span<const std::uint16_t> samples, int width,
                          int height, Resolution resolution = {});

enum class Interpolation { kBilinear, kBicubic };

// Resamples with pixel-centre alignment (source coordinate
// (i + 0.5) * in / out - 0.5) and edge replication. Bicubic uses the
// Catmull-Rom kernel and is clamped to [0, 1] for tagged domains.
Raster resize(const Raster& image, int width, int height,
              Interpolation method);

// Nearest neighbour: source index floor(i * in / out).
BinaryMask resize_mask(const BinaryMask& mask, int width, int height);

}  // namespace frontline

#endif  // FRONTLINE_RASTER_HPP_

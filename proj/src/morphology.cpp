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

#include "frontline/morphology.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <string>

#include "frontline/error.hpp"

namespace frontline {

StructuringElement::StructuringElement(int size, SeShape shape)
    : size_(size), shape_(shape) {
  if (size < 1 || size % 2 == 0) {
    throw ParameterError("structuring element size must be odd and >= 1, got " +
                         std::to_string(size));
  }
  const int r = radius();
  half_widths_.resize(2 * r + 1);
  for (int dy = -r; dy <= r; ++dy) {
    if (shape == SeShape::kSquare) {
      half_widths_[dy + r] = r;
    } else {
      // Largest dx with dx^2 + dy^2 <= r^2, computed in integers.
      int hw = 0;
      while ((hw + 1) * (hw + 1) + dy * dy <= r * r) ++hw;
      half_widths_[dy + r] = hw;
    }
  }
}

bool StructuringElement::contains(int dx, int dy) const {
  const int r = radius();
  if (dy < -r || dy > r) return false;
  return std::abs(dx) <= half_width(dy);
}

namespace {

Border opposite(Border b) {
  return b == Border::kBackground ? Border::kForeground : Border::kBackground;
}

}  // namespace

BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se,
                  Border border) {
  const int w = mask.width();
  const int h = mask.height();
  BinaryMask out(w, h, mask.resolution());
  if (w == 0 || h == 0) return out;
  const bool fg_border = border == Border::kForeground;

  // prefix[y][x] = number of true pixels in row y before column x.
  std::vector<int> prefix(static_cast<std::size_t>(h) * (w + 1), 0);
  for (int y = 0; y < h; ++y) {
    int* row = prefix.data() + static_cast<std::size_t>(y) * (w + 1);
    for (int x = 0; x < w; ++x) row[x + 1] = row[x] + (mask(x, y) ? 1 : 0);
  }
  const int r = se.radius();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      bool hit = false;
      for (int dy = -r; dy <= r && !hit; ++dy) {
        const int yy = y + dy;
        if (yy < 0 || yy >= h) {
          hit = fg_border;
          continue;
        }
        const int hw = se.half_width(dy);
        int x0 = x - hw;
        int x1 = x + hw;
        if (fg_border && (x0 < 0 || x1 >= w)) {
          hit = true;
          break;
        }
        x0 = std::max(x0, 0);
        x1 = std::min(x1, w - 1);
        const int* row = prefix.data() + static_cast<std::size_t>(yy) * (w + 1);
        hit = row[x1 + 1] - row[x0] > 0;
      }
      out.set(x, y, hit);
    }
  }
  return out;
}

BinaryMask erode(const BinaryMask& mask, const StructuringElement& se,
                 Border border) {
  return !dilate(!mask, se, opposite(border));
}

BinaryMask close(const BinaryMask& mask, const StructuringElement& se) {
  return erode(dilate(mask, se, Border::kBackground), se, Border::kForeground);
}

namespace {

// Neighbours in the order P2..P9 of Zhang-Suen: N, NE, E, SE, S, SW, W, NW.
constexpr std::array<int, 8> kNx = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr std::array<int, 8> kNy = {-1, -1, 0, 1, 1, 1, 0, -1};

std::array<int, 8> neighbours(const BinaryMask& m, int x, int y) {
  std::array<int, 8> p{};
  for (int k = 0; k < 8; ++k) p[k] = m.get(x + kNx[k], y + kNy[k]) ? 1 : 0;
  return p;
}

int count_on(const std::array<int, 8>& p) {
  int b = 0;
  for (int v : p) b += v;
  return b;
}

// 0 -> 1 transitions in the cyclic sequence P2, P3, ..., P9, P2.
int transitions(const std::array<int, 8>& p) {
  int a = 0;
  for (int k = 0; k < 8; ++k) a += (p[k] == 0 && p[(k + 1) % 8] == 1);
  return a;
}

// Yokoi connectivity number for 8-connected foreground. With the cyclic
// order E, NE, N, NW, W, SW, S, SE the pixel is simple iff it equals 1.
int yokoi8(const std::array<int, 8>& p) {
  // Re-index P2..P9 (N, NE, E, SE, S, SW, W, NW) to start at E and turn
  // counter-clockwise.
  const std::array<int, 8> q = {p[2], p[1], p[0], p[7], p[6], p[5], p[4], p[3]};
  int n = 0;
  for (int k = 0; k < 8; k += 2) {
    const int a = 1 - q[k];
    const int b = 1 - q[(k + 1) % 8];
    const int c = 1 - q[(k + 2) % 8];
    n += a - a * b * c;
  }
  return n;
}

}  // namespace

BinaryMask thin(const BinaryMask& mask) {
  BinaryMask m = mask;
  const int w = m.width();
  const int h = m.height();
  std::vector<std::pair<int, int>> candidates;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int step = 0; step < 2; ++step) {
      candidates.clear();
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          if (!m(x, y)) continue;
          const auto p = neighbours(m, x, y);
          const int b = count_on(p);
          if (b < 2 || b > 6 || transitions(p) != 1) continue;
          // p[0]=P2 (N), p[2]=P4 (E), p[4]=P6 (S), p[6]=P8 (W).
          const bool directional =
              step == 0 ? (p[0] * p[2] * p[4] == 0 && p[2] * p[4] * p[6] == 0)
                        : (p[0] * p[2] * p[6] == 0 && p[0] * p[4] * p[6] == 0);
          if (directional) candidates.emplace_back(x, y);
        }
      }
      for (const auto& [x, y] : candidates) {
        const auto p = neighbours(m, x, y);
        if (count_on(p) >= 2 && yokoi8(p) == 1) {
          m.set(x, y, false);
          changed = true;
        }
      }
    }
    if (changed) continue;
    // Zhang-Suen can stall on two-pixel-thick diagonals; clear the
    // remaining 2x2 blocks wherever a pixel of the block is simple.
    for (int y = 0; y + 1 < h; ++y) {
      for (int x = 0; x + 1 < w; ++x) {
        if (!(m(x, y) && m(x + 1, y) && m(x, y + 1) && m(x + 1, y + 1))) continue;
        for (const auto& [bx, by] : {std::pair{x, y}, std::pair{x + 1, y},
                                     std::pair{x, y + 1}, std::pair{x + 1, y + 1}}) {
          const auto p = neighbours(m, bx, by);
          if (count_on(p) >= 2 && yokoi8(p) == 1) {
            m.set(bx, by, false);
            changed = true;
            break;
          }
        }
      }
    }
  }
  return m;
}

ComponentLabeling connected_components(const BinaryMask& mask,
                                       Connectivity connectivity) {
  ComponentLabeling out;
  out.width = mask.width();
  out.height = mask.height();
  out.labels.assign(mask.size(), 0);
  const bool eight = connectivity == Connectivity::kEight;
  std::deque<std::pair<int, int>> queue;
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      if (!mask(x, y) || out.label(x, y) != 0) continue;
      const int label = out.count() + 1;
      std::size_t size = 0;
      out.labels[static_cast<std::size_t>(y) * out.width + x] = label;
      queue.emplace_back(x, y);
      while (!queue.empty()) {
        const auto [cx, cy] = queue.front();
        queue.pop_front();
        ++size;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            if (!eight && dx != 0 && dy != 0) continue;
            const int nx = cx + dx;
            const int ny = cy + dy;
            if (!mask.get(nx, ny)) continue;
            int& l = out.labels[static_cast<std::size_t>(ny) * out.width + nx];
            if (l != 0) continue;
            l = label;
            queue.emplace_back(nx, ny);
          }
        }
      }
      out.component_sizes.push_back(size);
    }
  }
  return out;
}

BinaryMask largest_component(const BinaryMask& mask) {
  const ComponentLabeling cc = connected_components(mask);
  if (cc.count() == 0) throw EmptyMaskError("empty mask has no components");
  // max_element returns the first maximum, i.e. the smallest label.
  const auto it = std::max_element(cc.component_sizes.begin(),
                                   cc.component_sizes.end());
  const int keep = static_cast<int>(it - cc.component_sizes.begin()) + 1;
  BinaryMask out(mask.width(), mask.height(), mask.resolution());
  for (std::size_t i = 0; i < cc.labels.size(); ++i) {
    out.mutable_bits()[i] = cc.labels[i] == keep ? 1 : 0;
  }
  return out;
}

namespace {

std::vector<double> gaussian_blur(const Raster& image, double sigma) {
  const int w = image.width();
  const int h = image.height();
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * r + 1);
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    kernel[i + r] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += kernel[i + r];
  }
  for (double& k : kernel) k /= sum;

  std::vector<double> tmp(static_cast<std::size_t>(w) * h);
  std::vector<double> out(tmp.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) {
        acc += kernel[i + r] * image(std::clamp(x + i, 0, w - 1), y);
      }
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) {
        acc += kernel[i + r] *
               tmp[static_cast<std::size_t>(std::clamp(y + i, 0, h - 1)) * w + x];
      }
      out[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  return out;
}

}  // namespace

BinaryMask canny_edges(const Raster& image, const CannyParams& params) {
  if (!(params.low >= 0.0) || !(params.high >= params.low)) {
    throw ParameterError("canny thresholds must satisfy 0 <= low <= high");
  }
  if (!(params.sigma > 0.0)) throw ParameterError("canny sigma must be > 0");
  if (image.empty()) throw DimensionError("empty image");

  const int w = image.width();
  const int h = image.height();
  const auto smooth = gaussian_blur(image, params.sigma);
  auto at = [&](int x, int y) {
    return smooth[static_cast<std::size_t>(std::clamp(y, 0, h - 1)) * w +
                  std::clamp(x, 0, w - 1)];
  };

  std::vector<double> mag(smooth.size());
  std::vector<std::uint8_t> dir(smooth.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = (at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1) -
                         at(x - 1, y - 1) - 2.0 * at(x - 1, y) - at(x - 1, y + 1)) /
                        8.0;
      const double gy = (at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1) -
                         at(x - 1, y - 1) - 2.0 * at(x, y - 1) - at(x + 1, y - 1)) /
                        8.0;
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      mag[i] = std::hypot(gx, gy);
      // Quantise the gradient direction to 0, 45, 90 or 135 degrees.
      double angle = std::atan2(gy, gx) * 180.0 / M_PI;
      if (angle < 0.0) angle += 180.0;
      if (angle < 22.5 || angle >= 157.5) {
        dir[i] = 0;
      } else if (angle < 67.5) {
        dir[i] = 1;
      } else if (angle < 112.5) {
        dir[i] = 2;
      } else {
        dir[i] = 3;
      }
    }
  }

  auto mag_at = [&](int x, int y) {
    if (x < 0 || y < 0 || x >= w || y >= h) return 0.0;
    return mag[static_cast<std::size_t>(y) * w + x];
  };
  // Offsets of the neighbour along the gradient for each direction bin
  // (image y grows downwards, so 45 degrees points to (+1, +1)).
  constexpr std::array<int, 4> kDx = {1, 1, 0, -1};
  constexpr std::array<int, 4> kDy = {0, 1, 1, 1};

  // 0 = none, 1 = weak, 2 = strong.
  std::vector<std::uint8_t> cls(smooth.size(), 0);
  std::deque<std::pair<int, int>> queue;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const double m = mag[i];
      if (m <= 0.0 || m < params.low) continue;
      const int d = dir[i];
      const double fwd = mag_at(x + kDx[d], y + kDy[d]);
      const double bwd = mag_at(x - kDx[d], y - kDy[d]);
      // Asymmetric comparison keeps exactly one pixel of a two-pixel plateau.
      if (!(m > fwd && m >= bwd)) continue;
      if (m >= params.high) {
        cls[i] = 2;
        queue.emplace_back(x, y);
      } else {
        cls[i] = 1;
      }
    }
  }
  while (!queue.empty()) {
    const auto [x, y] = queue.front();
    queue.pop_front();
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = x + dx;
        const int ny = y + dy;
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        auto& c = cls[static_cast<std::size_t>(ny) * w + nx];
        if (c == 1) {
          c = 2;
          queue.emplace_back(nx, ny);
        }
      }
    }
  }
  BinaryMask edges(w, h, image.resolution());
  for (std::size_t i = 0; i < cls.size(); ++i) {
    edges.mutable_bits()[i] = cls[i] == 2 ? 1 : 0;
  }
  return edges;
}

BinaryMask inner_boundary(const BinaryMask& mask) {
  BinaryMask out(mask.width(), mask.height(), mask.resolution());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask(x, y)) continue;
      const bool edge = (x > 0 && !mask(x - 1, y)) ||
                        (x + 1 < mask.width() && !mask(x + 1, y)) ||
                        (y > 0 && !mask(x, y - 1)) ||
                        (y + 1 < mask.height() && !mask(x, y + 1));
      out.set(x, y, edge);
    }
  }
  return out;
}

}  // namespace frontline

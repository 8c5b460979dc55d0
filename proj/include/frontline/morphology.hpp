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

#ifndef FRONTLINE_MORPHOLOGY_HPP_
#define FRONTLINE_MORPHOLOGY_HPP_

#include <cstddef>
#include <utility>
#include <vector>

#include "frontline/raster.hpp"

namespace frontline {

enum class SeShape { kSquare, kDisk };

// Centred, symmetric structuring element of odd full width `size`. A disk
// holds the offsets within radius (size - 1) / 2 of the centre.
class StructuringElement {
 public:
  StructuringElement(int size, SeShape shape);

  static StructuringElement square(int size) {
    return {size, SeShape::kSquare};
  }
  static StructuringElement disk(int size) { return {size, SeShape::kDisk}; }

  int size() const { return size_; }
  int radius() const { return (size_ - 1) / 2; }
  SeShape shape() const { return shape_; }
  // Half-width of the horizontal run at vertical offset dy in [-r, r].
  int half_width(int dy) const { return half_widths_[dy + radius()]; }
  bool contains(int dx, int dy) const;

 private:
  int size_;
  SeShape shape_;
  std::vector<int> half_widths_;
};

// Value assumed for pixels outside the image.
enum class Border { kBackground, kForeground };

// out(p) = true iff the element placed at p hits a true pixel.
BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se,
                  Border border = Border::kBackground);

// out(p) = true iff the element placed at p lies entirely inside the mask.
// With the default border, pixels near the edge whose element leaves the
// image are false. erode(m, se, b) == !dilate(!m, se, opposite(b)).
BinaryMask erode(const BinaryMask& mask, const StructuringElement& se,
                 Border border = Border::kBackground);

// Dilation followed by the adjoint erosion (outside counts as foreground),
// so the result is extensive and idempotent up to the image border.
BinaryMask close(const BinaryMask& mask, const StructuringElement& se);

// Zhang-Suen thinning to an 8-connected skeleton. Candidate pixels from each
// sub-iteration are removed in raster order and only while they remain
// simple, which keeps the number of 8-connected components (and holes)
// unchanged. Remaining 2x2 blocks are cleared under the same rule. Iterates
// to a fixed point, so thin(thin(m)) == thin(m).
BinaryMask thin(const BinaryMask& mask);

enum class Connectivity { kFour = 4, kEight = 8 };

struct ComponentLabeling {
  int width = 0;
  int height = 0;
  // 0 is background; components are 1..K in row-major order of their first
  // pixel.
  std::vector<int> labels;
  // component_sizes[k - 1] is the pixel count of label k.
  std::vector<std::size_t> component_sizes;

  int count() const { return static_cast<int>(component_sizes.size()); }
  int label(int x, int y) const {
    return labels[static_cast<std::size_t>(y) * width + x];
  }
};

ComponentLabeling connected_components(
    const BinaryMask& mask, Connectivity connectivity = Connectivity::kEight);

// Keeps the biggest 8-connected component; ties go to the component whose
// first pixel comes earliest in row-major order. Throws EmptyMaskError.
BinaryMask largest_component(const BinaryMask& mask);

struct CannyParams {
  double low = 0.1;
  double high = 0.2;
  double sigma = 1.0;
};

// Gaussian smoothing, Sobel gradients (scaled by 1/8 so magnitudes are in
// intensity units per pixel), non-maximum suppression and hysteresis with
// 8-connected tracking.
BinaryMask canny_edges(const Raster& image, const CannyParams& params = {});

// Foreground pixels with at least one background 4-neighbour inside the
// image.
BinaryMask inner_boundary(const BinaryMask& mask);

}  // namespace frontline

#endif  // FRONTLINE_MORPHOLOGY_HPP_

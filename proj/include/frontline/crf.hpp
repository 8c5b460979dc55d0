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

#ifndef FRONTLINE_CRF_HPP_
#define FRONTLINE_CRF_HPP_

#include <array>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "frontline/raster.hpp"

namespace frontline {

// kSymmetric divides each kernel by sqrt(d_i d_j), where d_i is the kernel
// mass pixel i receives from all other pixels. Without it a wide bilateral
// kernel hands every pixel thousands of votes and the minority front class
// vanishes. kNone uses the raw sums.
enum class CrfNormalization { kNone, kSymmetric };

// "none", "symmetric".
std::string_view to_string(CrfNormalization n);
CrfNormalization crf_normalization_from_string(std::string_view name);

// Weights and kernel scales of the fully connected pairwise potential
//   k(i, j) = w1 * exp(-|p_i - p_j|^2 / (2 sa^2) - (I_i - I_j)^2 / (2 sb^2))
//           + w2 * exp(-|p_i - p_j|^2 / (2 sg^2))
// with Potts compatibility. Spatial scales are in pixels, the intensity
// scale in [0, 1] units.
struct DenseCrfParams {
  double w1 = 4.0;
  double w2 = 0.0;
  double sigma_alpha = 512.0;
  double sigma_beta = 13.0 / 255.0;
  double sigma_gamma = 3.0;
  int iterations = 10;
  CrfNormalization normalization = CrfNormalization::kSymmetric;
  // Truncation radius for message passing. When unset, images up to
  // kExactPixelLimit pixels use all pairs and larger ones a radius of
  // ceil(3 * max(sigma_alpha, sigma_gamma)).
  std::optional<int> window;

  static constexpr int kExactPixelLimit = 96 * 96;

  void validate() const;
};

// Per-pixel distribution over {front, background}.
class LabelDistribution {
 public:
  static constexpr int kFront = 0;
  static constexpr int kBackground = 1;

  LabelDistribution() = default;
  LabelDistribution(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return q_.size(); }

  std::array<double, 2>& operator[](std::size_t i) { return q_[i]; }
  const std::array<double, 2>& operator[](std::size_t i) const { return q_[i]; }
  double front(int x, int y) const {
    return q_[static_cast<std::size_t>(y) * width_ + x][kFront];
  }

  // Largest |q_front + q_background - 1| or a negative entry (reported as
  // its magnitude plus one).
  double max_normalization_error() const;

  // Swaps the two labels at every pixel.
  LabelDistribution swapped() const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::array<double, 2>> q_;
};

// P(front) = clamp(dmap, eps, 1 - eps), P(background) = 1 - P(front).
LabelDistribution unary_from_distance_map(const Raster& dmap,
                                          double epsilon = 1e-6);

// Unary energies -log P per pixel and label.
std::vector<std::array<double, 2>> unary_energy(const LabelDistribution& p);

// Per-pixel softmax of negated energies (max-subtracted).
LabelDistribution softmax_of_negated(
    int width, int height, const std::vector<std::array<double, 2>>& energy);

// Called after every mean-field iteration with the 1-based iteration index.
using IterationObserver =
    std::function<void(int iteration, const LabelDistribution& q)>;

// Mean-field inference for the two-label dense CRF. `unary` holds the label
// probabilities P whose negative logs are the unary potentials. Messages are
// accumulated in a fixed order, so repeated runs are bit-identical.
LabelDistribution mean_field_infer(const LabelDistribution& unary,
                                   const Raster& image,
                                   const DenseCrfParams& params,
                                   const IterationObserver& observer = {});

// Per-pixel argmax; ties go to background.
BinaryMask map_labels(const LabelDistribution& q);

}  // namespace frontline

#endif  // FRONTLINE_CRF_HPP_

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

#ifndef FRONTLINE_DISTMAP_HPP_
#define FRONTLINE_DISTMAP_HPP_

#include "frontline/raster.hpp"

namespace frontline {

// Exponent of the normalised distance map; larger values concentrate the
// target around the front.
class DecayParam {
 public:
  explicit DecayParam(double gamma);
  double value() const { return gamma_; }

 private:
  double gamma_;
};

// Exact Euclidean distance (in pixels) from every pixel to the nearest
// true pixel of `front`. Uses the separable lower-envelope-of-parabolas
// algorithm on squared distances. Throws NoFrontError for an empty mask.
Raster euclidean_distance_transform(const BinaryMask& front);

// (1 - D / max D)^gamma. A map that is identically zero (front everywhere)
// maps to all ones.
Raster normalize_distance_map(const Raster& distances, DecayParam gamma);

// Regression target for a front line.
Raster front_to_distance_target(const BinaryMask& front, DecayParam gamma);

}  // namespace frontline

#endif  // FRONTLINE_DISTMAP_HPP_

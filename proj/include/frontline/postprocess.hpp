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

#ifndef FRONTLINE_POSTPROCESS_HPP_
#define FRONTLINE_POSTPROCESS_HPP_

#include <cstddef>
#include <filesystem>
#include <string_view>

#include "frontline/crf.hpp"
#include "frontline/nn/unet.hpp"
#include "frontline/raster.hpp"

namespace frontline {

enum class ExtractionMethod {
  kThreshold,
  kCrf,
  kSecondUnet,
  kBaselineZone,
  kBaselineLine
};

// "threshold", "crf", "second-unet", "baseline-zone", "baseline-line".
std::string_view to_string(ExtractionMethod method);
ExtractionMethod extraction_method_from_string(std::string_view name);

// Pixels strictly above the keep_fraction quantile of the map, thinned to
// a skeleton. Throws NoFrontError when nothing lies above the quantile.
BinaryMask threshold_band(const Raster& dmap, double keep_fraction = 0.95);
BinaryMask threshold_extract(const Raster& dmap, double keep_fraction = 0.95);

// Front-class MAP labels of the dense CRF seeded by the distance map.
BinaryMask crf_extract(const Raster& dmap, const Raster& image,
                       const DenseCrfParams& params = {});

// Second-stage network applied to a predicted distance map, binarized at
// `threshold`.
BinaryMask second_unet_extract(const Raster& dmap, const nn::UNet<float>& model,
                               double threshold = 0.5);
// Loads the checkpoint first; a missing file raises ModelError.
BinaryMask second_unet_extract(const Raster& dmap,
                               const std::filesystem::path& checkpoint,
                               double threshold = 0.5);

// Zone probability -> binarize -> 3x3 closing -> largest component ->
// Canny edge of the 0/1 mask. Throws EmptyMaskError if nothing exceeds the
// threshold.
BinaryMask baseline_zone_extract(const Raster& zone_prob,
                                 double threshold = 0.5);

// Direct line probability, binarized only.
BinaryMask baseline_line_extract(const Raster& line_prob,
                                 double threshold = 0.5);

inline constexpr int kMaxWidthSe = 15;

// Moves the foreground pixel count toward target_count. Each step tries
// square dilations 3..15 (below target) or square erosions 3..15 and
// thinning (above target) and takes the candidate strictly closest to the
// target; it stops when no candidate beats the current mask. The result is
// therefore a fixed point: adjust_width(adjust_width(m, t), t) equals
// adjust_width(m, t).
BinaryMask adjust_width(const BinaryMask& mask, std::size_t target_count);

}  // namespace frontline

#endif  // FRONTLINE_POSTPROCESS_HPP_

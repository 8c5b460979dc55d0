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

#include "frontline/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "frontline/error.hpp"
#include "frontline/morphology.hpp"
#include "frontline/nn/checkpoint.hpp"
#include "frontline/nn/train.hpp"

namespace frontline {

std::string_view to_string(ExtractionMethod method) {
  switch (method) {
    case ExtractionMethod::kThreshold: return "threshold";
    case ExtractionMethod::kCrf: return "crf";
    case ExtractionMethod::kSecondUnet: return "second-unet";
    case ExtractionMethod::kBaselineZone: return "baseline-zone";
    case ExtractionMethod::kBaselineLine: return "baseline-line";
  }
  return "unknown";
}

ExtractionMethod extraction_method_from_string(std::string_view name) {
  for (auto m : {ExtractionMethod::kThreshold, ExtractionMethod::kCrf,
                 ExtractionMethod::kSecondUnet, ExtractionMethod::kBaselineZone,
                 ExtractionMethod::kBaselineLine}) {
    if (to_string(m) == name) return m;
  }
  throw ParameterError("unknown extraction method '" + std::string(name) + "'");
}

namespace {

BinaryMask binarize(const Raster& image, double threshold) {
  BinaryMask out(image.width(), image.height(), image.resolution());
  const auto px = image.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    out.mutable_bits()[i] = px[i] > threshold ? 1 : 0;
  }
  return out;
}

}  // namespace

BinaryMask threshold_band(const Raster& dmap, double keep_fraction) {
  if (!(keep_fraction > 0.0 && keep_fraction < 1.0)) {
    throw ParameterError("keep fraction must lie in (0, 1)");
  }
  if (dmap.empty()) throw DimensionError("empty distance map");
  std::vector<double> sorted(dmap.pixels().begin(), dmap.pixels().end());
  const std::size_t n = sorted.size();
  // Smallest value with at least keep_fraction of the pixels at or below it.
  // The slack keeps 0.95 * 100 from rounding up to 96.
  const auto rank = static_cast<std::size_t>(
      std::max(1.0, std::ceil(keep_fraction * static_cast<double>(n) - 1e-9)));
  const std::size_t k = std::min(rank, n) - 1;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k),
                   sorted.end());
  const BinaryMask band = binarize(dmap, sorted[k]);
  if (!band.any()) throw NoFrontError("no front signal above the quantile");
  return band;
}

BinaryMask threshold_extract(const Raster& dmap, double keep_fraction) {
  return thin(threshold_band(dmap, keep_fraction));
}

BinaryMask crf_extract(const Raster& dmap, const Raster& image,
                       const DenseCrfParams& params) {
  if (dmap.width() != image.width() || dmap.height() != image.height()) {
    throw DimensionError("distance map and image dimensions differ");
  }
  const LabelDistribution unary = unary_from_distance_map(dmap);
  BinaryMask out = map_labels(mean_field_infer(unary, image, params));
  out.set_resolution(dmap.resolution());
  return out;
}

BinaryMask second_unet_extract(const Raster& dmap, const nn::UNet<float>& model,
                               double threshold) {
  const Raster prob = nn::predict(model, dmap, ValueDomain::kProbability01);
  return binarize(prob, threshold);
}

BinaryMask second_unet_extract(const Raster& dmap,
                               const std::filesystem::path& checkpoint,
                               double threshold) {
  if (!std::filesystem::exists(checkpoint)) {
    throw ModelError("second-stage model not found: " + checkpoint.string());
  }
  return second_unet_extract(dmap, nn::load_checkpoint(checkpoint).model,
                             threshold);
}

BinaryMask baseline_zone_extract(const Raster& zone_prob, double threshold) {
  if (zone_prob.empty()) throw DimensionError("empty zone prediction");
  const BinaryMask zone = binarize(zone_prob, threshold);
  if (!zone.any()) throw EmptyMaskError("no zone detected");
  const BinaryMask region =
      largest_component(close(zone, StructuringElement::square(3)));
  Raster as_image(region.width(), region.height(), region.resolution(),
                  ValueDomain::kIntensity01);
  const auto bits = region.bits();
  auto px = as_image.mutable_pixels();
  for (std::size_t i = 0; i < bits.size(); ++i) px[i] = bits[i] ? 1.0 : 0.0;
  BinaryMask edges = canny_edges(as_image);
  edges.set_resolution(zone_prob.resolution());
  return edges;
}

BinaryMask baseline_line_extract(const Raster& line_prob, double threshold) {
  return binarize(line_prob, threshold);
}

BinaryMask adjust_width(const BinaryMask& mask, std::size_t target_count) {
  if (target_count == 0) throw ParameterError("target count must be positive");
  if (!mask.any()) throw EmptyMaskError("cannot adjust the width of an empty mask");
  auto gap = [target_count](std::size_t c) {
    return c > target_count ? c - target_count : target_count - c;
  };
  BinaryMask current = mask;
  std::size_t count = current.count();
  while (count != target_count) {
    BinaryMask best;
    std::size_t best_gap = gap(count);
    auto consider = [&](BinaryMask candidate) {
      const std::size_t c = candidate.count();
      if (c > 0 && gap(c) < best_gap) {
        best_gap = gap(c);
        best = std::move(candidate);
      }
    };
    for (int s = 3; s <= kMaxWidthSe; s += 2) {
      const auto se = StructuringElement::square(s);
      consider(count < target_count ? dilate(current, se) : erode(current, se));
    }
    if (count > target_count) consider(thin(current));
    if (best.size() == 0) break;
    current = std::move(best);
    count = current.count();
  }
  return current;
}

}  // namespace frontline

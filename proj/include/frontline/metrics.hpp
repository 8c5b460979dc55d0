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

#ifndef FRONTLINE_METRICS_HPP_
#define FRONTLINE_METRICS_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "frontline/morphology.hpp"
#include "frontline/raster.hpp"

namespace frontline {

struct ToleranceSpec {
  double tolerance_m = 0.0;
  double resolution_m = 1.0;

  void validate() const;
};

inline const std::vector<double> kDefaultTolerances{0, 50, 100, 150, 200, 250};

// Radius round(tolerance / resolution), rounding halves away from zero.
int tolerance_radius(const ToleranceSpec& spec);
// Disk of size 2r + 1.
StructuringElement tolerance_to_se(const ToleranceSpec& spec);

struct Overlap {
  std::size_t a = 0;             // |A|
  std::size_t b = 0;             // |B|
  std::size_t intersection = 0;  // |A & B|

  std::size_t union_size() const { return a + b - intersection; }
  double dice() const;
  double iou() const;
};

// Pixel counts of the dilated masks A = dilate(y_true), B = dilate(y_pred).
// Throws DimensionError on shape mismatch and EmptyMaskError when y_true is
// empty.
Overlap tolerance_overlap(const BinaryMask& y_true, const BinaryMask& y_pred,
                          const ToleranceSpec& spec);
double dice_tolerance(const BinaryMask& y_true, const BinaryMask& y_pred,
                      const ToleranceSpec& spec);
double iou_tolerance(const BinaryMask& y_true, const BinaryMask& y_pred,
                     const ToleranceSpec& spec);

// Symmetric mean distance in pixels between two nonempty masks: the mean
// over both masks of each pixel's distance to the nearest pixel of the
// other one.
double mean_deviation(const BinaryMask& a, const BinaryMask& b);

struct EvaluationEntry {
  std::string sample_id;
  double tolerance_m = 0.0;
  double dice = 0.0;
  double iou = 0.0;
};

struct EvaluationReport {
  std::string method;
  std::vector<double> tolerances;
  std::vector<std::string> sample_ids;  // sorted
  // Sample-major, tolerance-minor.
  std::vector<EvaluationEntry> entries;
  // Arithmetic means of the per-sample scores, one per tolerance.
  std::vector<double> mean_dice;
  std::vector<double> mean_iou;

  // sample_id,method,tolerance_m,dice,iou
  std::string to_csv() const;
  std::string to_json() const;
};

struct EvaluationInput {
  std::string sample_id;
  BinaryMask truth;
  double resolution_m = 1.0;
};

// `predictions` is keyed by sample id. Missing predictions raise a
// DatasetError naming every absent id.
EvaluationReport evaluate_set(const std::vector<EvaluationInput>& samples,
                              const std::map<std::string, BinaryMask>& predictions,
                              const std::vector<double>& tolerances,
                              const std::string& method);

}  // namespace frontline

#endif  // FRONTLINE_METRICS_HPP_

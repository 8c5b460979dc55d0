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

#include "frontline/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "frontline/distmap.hpp"
#include "frontline/error.hpp"
#include "json.hpp"

namespace frontline {

void ToleranceSpec::validate() const {
  if (!(tolerance_m >= 0.0) || !std::isfinite(tolerance_m)) {
    throw ParameterError("tolerance must be a finite non-negative distance");
  }
  if (!(resolution_m > 0.0) || !std::isfinite(resolution_m)) {
    throw ParameterError("resolution must be positive");
  }
}

int tolerance_radius(const ToleranceSpec& spec) {
  spec.validate();
  return static_cast<int>(std::round(spec.tolerance_m / spec.resolution_m));
}

StructuringElement tolerance_to_se(const ToleranceSpec& spec) {
  return StructuringElement::disk(2 * tolerance_radius(spec) + 1);
}

double Overlap::dice() const {
  if (a + b == 0) return 0.0;
  return 2.0 * static_cast<double>(intersection) / static_cast<double>(a + b);
}

double Overlap::iou() const {
  const std::size_t u = union_size();
  if (u == 0) return 0.0;
  return static_cast<double>(intersection) / static_cast<double>(u);
}

Overlap tolerance_overlap(const BinaryMask& y_true, const BinaryMask& y_pred,
                          const ToleranceSpec& spec) {
  if (!y_true.same_shape(y_pred)) {
    throw DimensionError("ground truth and prediction shapes differ");
  }
  if (!y_true.any()) throw EmptyMaskError("score undefined for an empty ground truth");
  const StructuringElement se = tolerance_to_se(spec);
  Overlap o;
  if (!y_pred.any()) {
    o.a = dilate(y_true, se).count();
    return o;
  }
  const BinaryMask a = dilate(y_true, se);
  const BinaryMask b = dilate(y_pred, se);
  const auto ab = a.bits();
  const auto bb = b.bits();
  for (std::size_t i = 0; i < ab.size(); ++i) {
    o.a += ab[i];
    o.b += bb[i];
    o.intersection += ab[i] & bb[i];
  }
  return o;
}

double dice_tolerance(const BinaryMask& y_true, const BinaryMask& y_pred,
                      const ToleranceSpec& spec) {
  return tolerance_overlap(y_true, y_pred, spec).dice();
}

double iou_tolerance(const BinaryMask& y_true, const BinaryMask& y_pred,
                     const ToleranceSpec& spec) {
  return tolerance_overlap(y_true, y_pred, spec).iou();
}

double mean_deviation(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_shape(b)) throw DimensionError("mask shapes differ");
  if (!a.any() || !b.any()) throw EmptyMaskError("mean deviation of an empty mask");
  const Raster da = euclidean_distance_transform(a);
  const Raster db = euclidean_distance_transform(b);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.bits()[i]) {
      sum += db.pixels()[i];
      ++n;
    }
    if (b.bits()[i]) {
      sum += da.pixels()[i];
      ++n;
    }
  }
  return sum / static_cast<double>(n);
}

namespace {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string EvaluationReport::to_csv() const {
  std::string out = "sample_id,method,tolerance_m,dice,iou\n";
  for (const auto& e : entries) {
    out += e.sample_id + "," + method + "," + format_number(e.tolerance_m) +
           "," + format_number(e.dice) + "," + format_number(e.iou) + "\n";
  }
  return out;
}

std::string EvaluationReport::to_json() const {
  nlohmann::ordered_json j;
  j["method"] = method;
  j["samples"] = sample_ids.size();
  nlohmann::ordered_json agg = nlohmann::ordered_json::array();
  for (std::size_t t = 0; t < tolerances.size(); ++t) {
    agg.push_back({{"tolerance_m", tolerances[t]},
                   {"mean_dice", mean_dice[t]},
                   {"mean_iou", mean_iou[t]}});
  }
  j["aggregate"] = std::move(agg);
  return j.dump(2) + "\n";
}

EvaluationReport evaluate_set(const std::vector<EvaluationInput>& samples,
                              const std::map<std::string, BinaryMask>& predictions,
                              const std::vector<double>& tolerances,
                              const std::string& method) {
  std::vector<const EvaluationInput*> order;
  order.reserve(samples.size());
  std::string missing;
  for (const auto& s : samples) {
    order.push_back(&s);
    if (!predictions.contains(s.sample_id)) {
      missing += (missing.empty() ? "" : ", ") + s.sample_id;
    }
  }
  if (!missing.empty()) throw DatasetError("missing predictions for: " + missing);
  std::sort(order.begin(), order.end(),
            [](const auto* a, const auto* b) { return a->sample_id < b->sample_id; });

  EvaluationReport report;
  report.method = method;
  report.tolerances = tolerances;
  report.mean_dice.assign(tolerances.size(), 0.0);
  report.mean_iou.assign(tolerances.size(), 0.0);
  for (const auto* s : order) {
    report.sample_ids.push_back(s->sample_id);
    const BinaryMask& pred = predictions.at(s->sample_id);
    for (std::size_t t = 0; t < tolerances.size(); ++t) {
      const Overlap o =
          tolerance_overlap(s->truth, pred, {tolerances[t], s->resolution_m});
      report.entries.push_back({s->sample_id, tolerances[t], o.dice(), o.iou()});
      report.mean_dice[t] += o.dice();
      report.mean_iou[t] += o.iou();
    }
  }
  if (!order.empty()) {
    for (std::size_t t = 0; t < tolerances.size(); ++t) {
      report.mean_dice[t] /= static_cast<double>(order.size());
      report.mean_iou[t] /= static_cast<double>(order.size());
    }
  }
  return report;
}

}  // namespace frontline

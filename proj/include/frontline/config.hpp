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

#ifndef FRONTLINE_CONFIG_HPP_
#define FRONTLINE_CONFIG_HPP_

#include <string>
#include <vector>

#include "frontline/crf.hpp"
#include "frontline/metrics.hpp"
#include "frontline/nn/train.hpp"
#include "frontline/nn/unet.hpp"
#include "json.hpp"

namespace frontline {

struct PipelineConfig {
  double gamma = 7.0;
  int input_width = 512;
  int input_height = 512;
  nn::UNetConfig model;
  nn::TrainConfig stage1;  // lr 1e-3, mse
  nn::TrainConfig stage2{5e-6, 3, 30, nn::LossKind::kBce, 1000, 0};
  // Ground-truth lines are dilated with this square before stage-2 training.
  int stage2_dilation = 5;
  DenseCrfParams crf;
  double keep_fraction = 0.95;
  double binarize_threshold = 0.5;
  std::vector<double> tolerances = kDefaultTolerances;

  void validate() const;
};

// Missing keys keep their defaults; unknown keys are rejected.
PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const PipelineConfig& config);
PipelineConfig load_pipeline_config(const std::string& path);

}  // namespace frontline

#endif  // FRONTLINE_CONFIG_HPP_

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

#include "frontline/config.hpp"

#include <set>

#include "frontline/distmap.hpp"
#include "frontline/error.hpp"
#include "frontline/io.hpp"
#include "frontline/nn/checkpoint.hpp"

namespace frontline {

using nlohmann::json;

void PipelineConfig::validate() const {
  DecayParam{gamma};
  if (input_width < 1 || input_height < 1) {
    throw ParameterError("input size must be positive");
  }
  model.validate();
  stage1.validate();
  stage2.validate();
  if (stage2_dilation < 1 || stage2_dilation % 2 == 0) {
    throw ParameterError("stage-2 dilation must be a positive odd size");
  }
  crf.validate();
  if (!(keep_fraction > 0.0 && keep_fraction < 1.0)) {
    throw ParameterError("keep fraction must lie in (0, 1)");
  }
  for (double t : tolerances) ToleranceSpec{t, 1.0}.validate();
}

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> keys,
                    const std::string& where) {
  if (!j.is_object()) throw ParameterError(where + " must be an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items()) {
    if (!allowed.contains(k)) throw ParameterError("unknown config key " + where + "." + k);
  }
}

std::string loss_name(nn::LossKind k) { return k == nn::LossKind::kMse ? "mse" : "bce"; }

nn::LossKind loss_from_name(const std::string& s) {
  if (s == "mse") return nn::LossKind::kMse;
  if (s == "bce") return nn::LossKind::kBce;
  throw ParameterError("unknown loss '" + s + "'");
}

nn::TrainConfig train_from_json(const json& j, nn::TrainConfig c,
                                const std::string& where) {
  reject_unknown(j, {"learning_rate", "batch_size", "patience", "loss",
                     "max_epochs", "seed"}, where);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.patience = j.value("patience", c.patience);
  if (j.contains("loss")) c.loss = loss_from_name(j["loss"].get<std::string>());
  c.max_epochs = j.value("max_epochs", c.max_epochs);
  c.seed = j.value("seed", c.seed);
  return c;
}

json train_to_json(const nn::TrainConfig& c) {
  return {{"learning_rate", c.learning_rate}, {"batch_size", c.batch_size},
          {"patience", c.patience},           {"loss", loss_name(c.loss)},
          {"max_epochs", c.max_epochs},       {"seed", c.seed}};
}

}  // namespace

PipelineConfig config_from_json(const json& j) {
  PipelineConfig c;
  try {
    reject_unknown(j, {"gamma", "input_size", "model", "stage1", "stage2",
                       "stage2_dilation", "crf", "keep_fraction",
                       "binarize_threshold", "tolerances"}, "config");
    c.gamma = j.value("gamma", c.gamma);
    if (j.contains("input_size")) {
      const auto s = j["input_size"].get<std::vector<int>>();
      if (s.size() != 2) throw ParameterError("input_size must be [width, height]");
      c.input_width = s[0];
      c.input_height = s[1];
    }
    if (j.contains("model")) c.model = nn::config_from_json(j["model"]);
    if (j.contains("stage1")) c.stage1 = train_from_json(j["stage1"], c.stage1, "stage1");
    if (j.contains("stage2")) c.stage2 = train_from_json(j["stage2"], c.stage2, "stage2");
    c.stage2_dilation = j.value("stage2_dilation", c.stage2_dilation);
    if (j.contains("crf")) {
      const json& k = j["crf"];
      reject_unknown(k, {"w1", "w2", "sigma_alpha", "sigma_beta", "sigma_gamma",
                         "iterations", "window", "normalization"}, "crf");
      c.crf.w1 = k.value("w1", c.crf.w1);
      c.crf.w2 = k.value("w2", c.crf.w2);
      c.crf.sigma_alpha = k.value("sigma_alpha", c.crf.sigma_alpha);
      c.crf.sigma_beta = k.value("sigma_beta", c.crf.sigma_beta);
      c.crf.sigma_gamma = k.value("sigma_gamma", c.crf.sigma_gamma);
      c.crf.iterations = k.value("iterations", c.crf.iterations);
      if (k.contains("normalization")) {
        c.crf.normalization = crf_normalization_from_string(k["normalization"].get<std::string>());
      }
      if (k.contains("window") && !k["window"].is_null()) {
        c.crf.window = k["window"].get<int>();
      }
    }
    c.keep_fraction = j.value("keep_fraction", c.keep_fraction);
    c.binarize_threshold = j.value("binarize_threshold", c.binarize_threshold);
    if (j.contains("tolerances")) c.tolerances = j["tolerances"].get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ParameterError(std::string("bad config: ") + e.what());
  }
  c.validate();
  return c;
}

json config_to_json(const PipelineConfig& c) {
  json crf = {{"w1", c.crf.w1},
              {"w2", c.crf.w2},
              {"sigma_alpha", c.crf.sigma_alpha},
              {"sigma_beta", c.crf.sigma_beta},
              {"sigma_gamma", c.crf.sigma_gamma},
              {"iterations", c.crf.iterations},
              {"window", c.crf.window ? json(*c.crf.window) : json(nullptr)},
              {"normalization", std::string(to_string(c.crf.normalization))}};
  return {{"gamma", c.gamma},
          {"input_size", {c.input_width, c.input_height}},
          {"model", nn::config_to_json(c.model)},
          {"stage1", train_to_json(c.stage1)},
          {"stage2", train_to_json(c.stage2)},
          {"stage2_dilation", c.stage2_dilation},
          {"crf", crf},
          {"keep_fraction", c.keep_fraction},
          {"binarize_threshold", c.binarize_threshold},
          {"tolerances", c.tolerances}};
}

PipelineConfig load_pipeline_config(const std::string& path) {
  json j;
  try {
    j = json::parse(io::read_file(path));
  } catch (const json::exception& e) {
    throw ParameterError(path + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace frontline

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

#ifndef FRONTLINE_NN_CHECKPOINT_HPP_
#define FRONTLINE_NN_CHECKPOINT_HPP_

#include <filesystem>
#include <string_view>

#include "frontline/nn/unet.hpp"
#include "json.hpp"

namespace frontline::nn {

// Checkpoint layout:
//   "FRONTLINE-NN-1\n"
//   uint32 little-endian byte length of the header
//   header: JSON {"format", "config", "tensors": [{"name", "shape", "kind"}],
//                 "adam_step", "metadata"}
//   float32 little-endian values of every tensor listed in the header, in
//   order: trainable parameters first, then batch-norm running statistics.
inline constexpr std::string_view kCheckpointMagic = "FRONTLINE-NN-1\n";

nlohmann::json config_to_json(const UNetConfig& config);
UNetConfig config_from_json(const nlohmann::json& j);

template <typename T>
void save_checkpoint(const std::filesystem::path& path, const UNet<T>& model,
                     const nlohmann::json& metadata = nlohmann::json::object());

struct LoadedModel {
  UNet<float> model;
  nlohmann::json metadata;
};

// Throws ModelError when the file is missing, truncated or inconsistent.
LoadedModel load_checkpoint(const std::filesystem::path& path);

}  // namespace frontline::nn

#endif  // FRONTLINE_NN_CHECKPOINT_HPP_

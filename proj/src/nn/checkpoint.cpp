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

#include "frontline/nn/checkpoint.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>

#include "frontline/error.hpp"
#include "frontline/io.hpp"

namespace frontline::nn {

nlohmann::json config_to_json(const UNetConfig& config) {
  return {{"depth", config.depth},
          {"base_filters", config.base_filters},
          {"input_channels", config.input_channels},
          {"conv_kernel", config.conv_kernel},
          {"upconv_kernel", config.upconv_kernel},
          {"final_kernel", config.final_kernel},
          {"leaky_slope", config.leaky_slope}};
}

UNetConfig config_from_json(const nlohmann::json& j) {
  UNetConfig c;
  c.depth = j.value("depth", c.depth);
  c.base_filters = j.value("base_filters", c.base_filters);
  c.input_channels = j.value("input_channels", c.input_channels);
  c.conv_kernel = j.value("conv_kernel", c.conv_kernel);
  c.upconv_kernel = j.value("upconv_kernel", c.upconv_kernel);
  c.final_kernel = j.value("final_kernel", c.final_kernel);
  c.leaky_slope = j.value("leaky_slope", c.leaky_slope);
  c.validate();
  return c;
}

namespace {

nlohmann::json shape_json(const std::array<int, 4>& s) {
  return nlohmann::json::array({s[0], s[1], s[2], s[3]});
}

template <typename T>
void append_floats(std::string& out, const Tensor<T>& t) {
  const std::size_t base = out.size();
  out.resize(base + t.size() * 4);
  char* p = out.data() + base;
  for (T v : t.values()) {
    const auto u = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    for (int b = 0; b < 4; ++b) *p++ = static_cast<char>((u >> (8 * b)) & 0xff);
  }
}

void read_floats(const std::string& data, std::size_t& pos, Tensor<float>& t,
                 const std::string& name) {
  if (data.size() - pos < t.size() * 4) {
    throw ModelError("checkpoint truncated in tensor " + name);
  }
  const auto* p = reinterpret_cast<const unsigned char*>(data.data() + pos);
  for (float& v : t.values()) {
    std::uint32_t u = 0;
    for (int b = 0; b < 4; ++b) u |= static_cast<std::uint32_t>(*p++) << (8 * b);
    v = std::bit_cast<float>(u);
    if (!std::isfinite(v)) throw ModelError("non-finite value in tensor " + name);
  }
  pos += t.size() * 4;
}

}  // namespace

template <typename T>
void save_checkpoint(const std::filesystem::path& path, const UNet<T>& model,
                     const nlohmann::json& metadata) {
  const ParameterSet<T>& ps = model.parameters();
  nlohmann::json header;
  header["format"] = "frontline-unet";
  header["config"] = config_to_json(model.config());
  nlohmann::json tensors = nlohmann::json::array();
  std::string blob;
  for (const auto& p : ps.params) {
    tensors.push_back(
        {{"name", p.name}, {"shape", shape_json(p.value.shape())}, {"kind", "param"}});
    append_floats(blob, p.value);
  }
  for (std::size_t i = 0; i < ps.buffers.size(); ++i) {
    tensors.push_back({{"name", ps.buffer_names[i]},
                       {"shape", shape_json(ps.buffers[i].shape())},
                       {"kind", "buffer"}});
    append_floats(blob, ps.buffers[i]);
  }
  header["tensors"] = std::move(tensors);
  header["adam_step"] = ps.step;
  header["metadata"] = metadata;
  const std::string text = header.dump();
  std::string out(kCheckpointMagic);
  const auto len = static_cast<std::uint32_t>(text.size());
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((len >> (8 * b)) & 0xff));
  out += text;
  out += blob;
  io::atomic_write(path, out);
}

LoadedModel load_checkpoint(const std::filesystem::path& path) {
  std::string data;
  try {
    data = io::read_file(path);
  } catch (const Error&) {
    throw ModelError("cannot read checkpoint " + path.string());
  }
  if (data.size() < kCheckpointMagic.size() + 4 ||
      data.compare(0, kCheckpointMagic.size(), kCheckpointMagic) != 0) {
    throw ModelError(path.string() + " is not a frontline checkpoint");
  }
  std::size_t pos = kCheckpointMagic.size();
  std::uint32_t len = 0;
  for (int b = 0; b < 4; ++b) {
    len |= static_cast<std::uint32_t>(static_cast<unsigned char>(data[pos + b])) << (8 * b);
  }
  pos += 4;
  if (data.size() - pos < len) throw ModelError("checkpoint header truncated");
  nlohmann::json header;
  UNetConfig config;
  try {
    header = nlohmann::json::parse(data.substr(pos, len));
    config = config_from_json(header.at("config"));
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("bad checkpoint header: ") + e.what());
  } catch (const ParameterError& e) {
    throw ModelError(std::string("bad checkpoint config: ") + e.what());
  }
  pos += len;

  ParameterSet<float> ps = he_init<float>(config, 0);
  const auto& tensors = header.at("tensors");
  if (tensors.size() != ps.params.size() + ps.buffers.size()) {
    throw ModelError("checkpoint tensor count does not match its config");
  }
  std::size_t k = 0;
  auto check = [&](const std::string& name, const Tensor<float>& t) {
    const auto& entry = tensors[k++];
    std::array<int, 4> shape{};
    try {
      if (entry.at("name").get<std::string>() != name) {
        throw ModelError("checkpoint tensor order mismatch at " + name);
      }
      shape = entry.at("shape").get<std::array<int, 4>>();
    } catch (const nlohmann::json::exception& e) {
      throw ModelError(std::string("bad tensor entry: ") + e.what());
    }
    if (shape != t.shape()) throw ModelError("checkpoint shape mismatch at " + name);
  };
  for (auto& p : ps.params) {
    check(p.name, p.value);
    read_floats(data, pos, p.value, p.name);
  }
  for (std::size_t i = 0; i < ps.buffers.size(); ++i) {
    check(ps.buffer_names[i], ps.buffers[i]);
    read_floats(data, pos, ps.buffers[i], ps.buffer_names[i]);
  }
  if (pos != data.size()) throw ModelError("trailing bytes in checkpoint");
  ps.step = header.value("adam_step", std::int64_t{0});
  nlohmann::json metadata = header.value("metadata", nlohmann::json::object());
  return {UNet<float>(config, std::move(ps)), std::move(metadata)};
}

template void save_checkpoint<float>(const std::filesystem::path&,
                                     const UNet<float>&, const nlohmann::json&);
template void save_checkpoint<double>(const std::filesystem::path&,
                                      const UNet<double>&, const nlohmann::json&);

}  // namespace frontline::nn

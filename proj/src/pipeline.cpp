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

#include "frontline/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>

#include "frontline/morphology.hpp"

namespace frontline {

Raster prepare_input(const Raster& sar, int width, int height) {
  if (sar.width() == width && sar.height() == height) return sar;
  return resize(sar, width, height, Interpolation::kBicubic);
}

Raster stage1_target(const BinaryMask& line, DecayParam gamma, int width,
                     int height) {
  const Raster target = front_to_distance_target(line, gamma);
  if (line.width() == width && line.height() == height) return target;
  return resize(target, width, height, Interpolation::kBicubic);
}

Raster stage2_target(const BinaryMask& line, int dilation, int width,
                     int height) {
  BinaryMask thick = dilate(line, StructuringElement::square(dilation));
  if (thick.width() != width || thick.height() != height) {
    thick = resize_mask(thick, width, height);
  }
  Raster out(width, height, thick.resolution(), ValueDomain::kProbability01);
  auto px = out.mutable_pixels();
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = thick.bits()[i] ? 1.0 : 0.0;
  return out;
}

nn::Example<float> make_example(const Raster& input, const Raster& target) {
  return {nn::to_tensor<float>(input), nn::to_tensor<float>(target)};
}

int worker_count() {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("FRONTLINE_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return n;
}

std::vector<std::string> parallel_for(std::size_t n,
                                      const std::function<void(std::size_t)>& body) {
  std::vector<std::string> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (const std::exception& e) {
        errors[i] = e.what();
        if (errors[i].empty()) errors[i] = "unknown error";
      }
    }
  };
  const int threads = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(worker_count()), n));
  if (threads <= 1) {
    work();
    return errors;
  }
  std::vector<std::jthread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(work);
  pool.clear();
  return errors;
}

}  // namespace frontline

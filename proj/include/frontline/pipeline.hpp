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

#ifndef FRONTLINE_PIPELINE_HPP_
#define FRONTLINE_PIPELINE_HPP_

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "frontline/distmap.hpp"
#include "frontline/nn/train.hpp"
#include "frontline/raster.hpp"

namespace frontline {

// Network input: the SAR image resampled bicubically to width x height
// (unchanged when the size already matches).
Raster prepare_input(const Raster& sar, int width, int height);

// Stage-1 regression target: the distance target of the full-resolution
// line, resampled bicubically.
Raster stage1_target(const BinaryMask& line, DecayParam gamma, int width,
                     int height);

// Stage-2 segmentation target: the line dilated with a square of
// `dilation` pixels, resampled nearest-neighbour, as 0/1 values.
Raster stage2_target(const BinaryMask& line, int dilation, int width,
                     int height);

nn::Example<float> make_example(const Raster& input, const Raster& target);

// Worker count: hardware concurrency capped by FRONTLINE_THREADS when set.
int worker_count();

// Runs body(i) for i in [0, n) on up to worker_count() threads. Exceptions
// are caught per index and returned as messages (empty on success), so the
// result never depends on scheduling.
std::vector<std::string> parallel_for(std::size_t n,
                                      const std::function<void(std::size_t)>& body);

}  // namespace frontline

#endif  // FRONTLINE_PIPELINE_HPP_

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

#ifndef FRONTLINE_IO_HPP_
#define FRONTLINE_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "frontline/raster.hpp"

namespace frontline::io {

// Writes to a sibling temporary file and renames it into place.
void atomic_write(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

struct GrayImage {
  int width = 0;
  int height = 0;
  int maxval = 0;
  std::vector<std::uint16_t> samples;
};

// Binary PGM (P5). 16-bit samples are big-endian as the format requires.
// Comments and arbitrary whitespace in the header are accepted.
GrayImage read_pgm(const std::filesystem::path& path);
std::string encode_pgm(const GrayImage& image);
void write_pgm(const std::filesystem::path& path, const GrayImage& image);

// 16-bit PGM -> intensity raster in [0, 1] (value / 65535 for maxval 65535,
// value / maxval otherwise).
Raster read_intensity_pgm(const std::filesystem::path& path,
                          Resolution resolution);
void write_intensity_pgm(const std::filesystem::path& path,
                         const Raster& image);

// 8-bit masks: 0 background, 255 foreground. Any non-zero sample reads as
// foreground.
BinaryMask read_mask_pgm(const std::filesystem::path& path,
                         Resolution resolution);
void write_mask_pgm(const std::filesystem::path& path, const BinaryMask& mask);

// Categorised zone ground truth: 0 ice melange, 128 rock / coast,
// 255 glacier. The glacier class becomes the foreground.
inline constexpr std::uint8_t kZoneMelange = 0;
inline constexpr std::uint8_t kZoneRock = 128;
inline constexpr std::uint8_t kZoneGlacier = 255;
BinaryMask read_zone_pgm(const std::filesystem::path& path,
                         Resolution resolution);
void write_zone_pgm(const std::filesystem::path& path, const BinaryMask& glacier);

// Raw little-endian float32 pixels at `path` plus a JSON sidecar at
// `path` with extension ".json": {width, height, resolution_m,
// resolution_x_m, resolution_y_m, value_domain}.
void write_float_raster(const std::filesystem::path& path, const Raster& image);
Raster read_float_raster(const std::filesystem::path& path);
std::filesystem::path sidecar_path(const std::filesystem::path& path);

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  bool operator==(const Rgb&) const = default;
};

inline constexpr Rgb kOverlayBackground{0, 0, 0};
inline constexpr Rgb kOverlayPrediction{255, 0, 0};
inline constexpr Rgb kOverlayTruth{0, 255, 0};
inline constexpr Rgb kOverlayBoth{255, 255, 0};

// Prediction red, ground truth green, overlap yellow, rest black.
std::vector<Rgb> overlay_pixels(const BinaryMask& prediction,
                                const BinaryMask& truth);
void write_png(const std::filesystem::path& path, int width, int height,
               const std::vector<Rgb>& pixels);
std::vector<Rgb> read_png(const std::filesystem::path& path, int* width,
                          int* height);

}  // namespace frontline::io

#endif  // FRONTLINE_IO_HPP_

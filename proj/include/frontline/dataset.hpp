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

#ifndef FRONTLINE_DATASET_HPP_
#define FRONTLINE_DATASET_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "frontline/raster.hpp"

namespace frontline {

// Analyst grade of a picked front. Grades 1..5 carry a horizontal accuracy
// in meters; grade 6 has none.
class QualityFactor {
 public:
  explicit QualityFactor(int value = 1);
  int value() const { return value_; }
  std::optional<double> sigma_f() const;
  bool operator==(const QualityFactor&) const = default;

 private:
  int value_;
};

struct Sample {
  std::string id;
  Raster sar;
  BinaryMask front_line;
  std::optional<BinaryMask> zone_mask;  // glacier foreground
  QualityFactor quality;
  double resolution_m = 1.0;
  std::string sensor;
  std::string date;
  std::string orientation = "r0";

  // Throws DimensionError / DatasetError when the rasters disagree.
  void validate() const;
};

struct ManifestRecord {
  std::string id;
  std::filesystem::path sar_path;
  std::filesystem::path line_path;
  std::filesystem::path zone_path;  // empty when absent
  QualityFactor quality;
  double resolution_m = 1.0;
  std::string sensor;
  std::string date;
};

// Paths in records are relative to `base_dir`.
struct Manifest {
  std::filesystem::path base_dir;
  std::vector<ManifestRecord> records;

  std::size_t size() const { return records.size(); }
};

inline constexpr std::string_view kManifestHeader =
    "id,sar_path,line_path,zone_path,quality,resolution_m,sensor,date";

// Parses and validates the CSV; every referenced file must exist. Errors
// name the offending row.
Manifest load_manifest(const std::filesystem::path& path);
Manifest parse_manifest(const std::string& text,
                        const std::filesystem::path& base_dir,
                        bool check_files = true);
std::string format_manifest(const Manifest& manifest);

Sample load_sample(const Manifest& manifest, const ManifestRecord& record);
std::vector<Sample> load_samples(const Manifest& manifest);

// Keeps records with quality <= max_factor, preserving order.
Manifest filter_by_quality(const Manifest& manifest, int max_factor = 5);

// Orientation k in 0..7: rotate k % 4 quarter turns counter-clockwise,
// after a horizontal flip when k >= 4.
Raster orient(const Raster& image, int k);
BinaryMask orient(const BinaryMask& mask, int k);
std::string orientation_tag(int k);

// The eight dihedral orientations of a square sample; image and masks are
// transformed together.
std::vector<Sample> augment_eightfold(const Sample& sample);

struct SplitCounts {
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;
};

struct ManifestSplit {
  Manifest train;
  Manifest val;
  Manifest test;
};

// Seeded shuffle, then consecutive slices.
ManifestSplit split(const Manifest& manifest, SplitCounts counts,
                    std::uint64_t seed);

struct SynthOptions {
  int count = 10;
  int size = 64;
  std::uint64_t seed = 0;
  // Coefficient of variation of the multiplicative speckle; 0 yields two
  // clean constant regions.
  double noise = 0.3;
  double resolution_m = 20.0;
};

// Synthetic scenes: a random front curve crossing the image splits a
// bright glacier from darker melange with bright clutter blobs. The line
// mask is the glacier's inner boundary and is 8-connected from one image
// edge to the opposite one.
std::vector<Sample> synth_generate(const SynthOptions& options);

// Writes <id>_sar.pgm, <id>_line.pgm, <id>_zone.pgm and manifest.csv into
// `dir` and returns the manifest.
Manifest write_samples(const std::filesystem::path& dir,
                       const std::vector<Sample>& samples);

}  // namespace frontline

#endif  // FRONTLINE_DATASET_HPP_

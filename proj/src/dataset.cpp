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

#include "frontline/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "frontline/error.hpp"
#include "frontline/io.hpp"
#include "frontline/morphology.hpp"

namespace frontline {

namespace fs = std::filesystem;

QualityFactor::QualityFactor(int value) : value_(value) {
  if (value < 1 || value > 6) {
    throw ParameterError("quality factor must lie in 1..6, got " +
                         std::to_string(value));
  }
}

std::optional<double> QualityFactor::sigma_f() const {
  static constexpr double kSigma[] = {70.0, 130.0, 200.0, 230.0, 450.0};
  if (value_ == 6) return std::nullopt;
  return kSigma[value_ - 1];
}

void Sample::validate() const {
  if (sar.empty()) throw DimensionError(id + ": empty SAR image");
  if (sar.width() != front_line.width() || sar.height() != front_line.height()) {
    throw DimensionError(id + ": front line and SAR dimensions differ");
  }
  if (zone_mask && !zone_mask->same_shape(front_line)) {
    throw DimensionError(id + ": zone mask and SAR dimensions differ");
  }
  if (!(resolution_m > 0.0)) throw DatasetError(id + ": non-positive resolution");
  if (std::abs(sar.resolution().geometric_mean() - resolution_m) >
      1e-9 * resolution_m) {
    throw DatasetError(id + ": raster resolution disagrees with the record");
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Manifest parse_manifest(const std::string& text, const fs::path& base_dir,
                        bool check_files) {
  Manifest m;
  m.base_dir = base_dir;
  std::istringstream in(text);
  std::string line;
  int row = 0;
  bool header_seen = false;
  std::set<std::string> ids;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kManifestHeader) {
        throw DatasetError("manifest row 1: expected header '" +
                           std::string(kManifestHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    const std::string where = "manifest row " + std::to_string(row);
    const auto f = split_csv_line(line);
    if (f.size() != 8) throw DatasetError(where + ": expected 8 fields");
    ManifestRecord r;
    r.id = f[0];
    if (r.id.empty()) throw DatasetError(where + ": empty id");
    if (!ids.insert(r.id).second) {
      throw DatasetError(where + ": duplicate id '" + r.id + "'");
    }
    r.sar_path = f[1];
    r.line_path = f[2];
    r.zone_path = f[3];
    try {
      std::size_t used = 0;
      r.quality = QualityFactor(std::stoi(f[4], &used));
      if (used != f[4].size()) throw std::invalid_argument(f[4]);
      r.resolution_m = std::stod(f[5], &used);
      if (used != f[5].size() || !(r.resolution_m > 0.0)) {
        throw std::invalid_argument(f[5]);
      }
    } catch (const std::exception&) {
      throw DatasetError(where + ": bad quality or resolution");
    }
    r.sensor = f[6];
    r.date = f[7];
    if (check_files) {
      for (const fs::path* p : {&r.sar_path, &r.line_path, &r.zone_path}) {
        if (p->empty() && p == &r.zone_path) continue;
        if (p->empty() || !fs::exists(base_dir / *p)) {
          throw DatasetError(where + ": missing file '" + p->string() + "'");
        }
      }
    }
    m.records.push_back(std::move(r));
  }
  return m;
}

Manifest load_manifest(const fs::path& path) {
  return parse_manifest(io::read_file(path), path.parent_path());
}

std::string format_manifest(const Manifest& manifest) {
  std::string out(kManifestHeader);
  out += '\n';
  char res[32];
  for (const auto& r : manifest.records) {
    std::snprintf(res, sizeof(res), "%.17g", r.resolution_m);
    out += csv_field(r.id) + "," + csv_field(r.sar_path.generic_string()) + "," +
           csv_field(r.line_path.generic_string()) + "," +
           csv_field(r.zone_path.generic_string()) + "," +
           std::to_string(r.quality.value()) + "," + res + "," +
           csv_field(r.sensor) + "," + csv_field(r.date) + "\n";
  }
  return out;
}

Sample load_sample(const Manifest& manifest, const ManifestRecord& record) {
  const Resolution res = Resolution::isotropic(record.resolution_m);
  Sample s;
  s.id = record.id;
  try {
    s.sar = io::read_intensity_pgm(manifest.base_dir / record.sar_path, res);
    s.front_line = io::read_mask_pgm(manifest.base_dir / record.line_path, res);
    if (!record.zone_path.empty()) {
      s.zone_mask = io::read_zone_pgm(manifest.base_dir / record.zone_path, res);
    }
  } catch (const Error& e) {
    throw DatasetError("sample '" + record.id + "': " + e.what());
  }
  s.quality = record.quality;
  s.resolution_m = record.resolution_m;
  s.sensor = record.sensor;
  s.date = record.date;
  s.validate();
  return s;
}

std::vector<Sample> load_samples(const Manifest& manifest) {
  std::vector<Sample> out;
  out.reserve(manifest.size());
  for (const auto& r : manifest.records) out.push_back(load_sample(manifest, r));
  return out;
}

Manifest filter_by_quality(const Manifest& manifest, int max_factor) {
  if (max_factor < 1 || max_factor > 6) {
    throw ParameterError("max quality factor must lie in 1..6");
  }
  Manifest out;
  out.base_dir = manifest.base_dir;
  for (const auto& r : manifest.records) {
    if (r.quality.value() <= max_factor) out.records.push_back(r);
  }
  return out;
}

namespace {

// Source index of output pixel (x, y) for orientation k of an n x n grid.
std::size_t oriented_source(int x, int y, int n, int k) {
  for (int r = 0; r < k % 4; ++r) {
    // One counter-clockwise quarter turn: out(x, y) = in(n-1-y, x).
    const int sx = n - 1 - y;
    const int sy = x;
    x = sx;
    y = sy;
  }
  if (k >= 4) x = n - 1 - x;
  return static_cast<std::size_t>(y) * n + x;
}

template <typename Span, typename Out>
void orient_into(Span in, Out out, int n, int k) {
  if (k < 0 || k > 7) throw ParameterError("orientation must lie in 0..7");
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      out[static_cast<std::size_t>(y) * n + x] = in[oriented_source(x, y, n, k)];
    }
  }
}

}  // namespace

Raster orient(const Raster& image, int k) {
  if (image.width() != image.height()) {
    throw DimensionError("orientation needs a square image");
  }
  Raster out(image.width(), image.height(), image.resolution(), image.domain());
  orient_into(image.pixels(), out.mutable_pixels(), image.width(), k);
  if (k % 2 == 1) {
    out.set_resolution({image.resolution().y, image.resolution().x});
  }
  return out;
}

BinaryMask orient(const BinaryMask& mask, int k) {
  if (mask.width() != mask.height()) {
    throw DimensionError("orientation needs a square mask");
  }
  BinaryMask out(mask.width(), mask.height(), mask.resolution());
  orient_into(mask.bits(), out.mutable_bits(), mask.width(), k);
  if (k % 2 == 1) out.set_resolution({mask.resolution().y, mask.resolution().x});
  return out;
}

std::string orientation_tag(int k) {
  static const char* kTags[] = {"r0", "r90", "r180", "r270",
                                "f0", "f90", "f180", "f270"};
  if (k < 0 || k > 7) throw ParameterError("orientation must lie in 0..7");
  return kTags[k];
}

std::vector<Sample> augment_eightfold(const Sample& sample) {
  if (sample.sar.width() != sample.sar.height()) {
    throw DimensionError(sample.id + ": augmentation needs square images");
  }
  std::vector<Sample> out;
  out.reserve(8);
  for (int k = 0; k < 8; ++k) {
    Sample s = sample;
    s.sar = orient(sample.sar, k);
    s.front_line = orient(sample.front_line, k);
    if (sample.zone_mask) s.zone_mask = orient(*sample.zone_mask, k);
    s.orientation = orientation_tag(k);
    s.id = sample.id + "_" + s.orientation;
    out.push_back(std::move(s));
  }
  return out;
}

ManifestSplit split(const Manifest& manifest, SplitCounts counts,
                    std::uint64_t seed) {
  if (counts.train + counts.val + counts.test > manifest.size()) {
    throw ParameterError("split counts exceed the manifest size");
  }
  std::vector<std::size_t> order(manifest.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  // Fisher-Yates with an explicit draw so the order does not depend on the
  // standard library's shuffle.
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  ManifestSplit out;
  out.train.base_dir = out.val.base_dir = out.test.base_dir = manifest.base_dir;
  std::size_t pos = 0;
  auto take = [&](Manifest& m, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) m.records.push_back(manifest.records[order[pos++]]);
  };
  take(out.train, counts.train);
  take(out.val, counts.val);
  take(out.test, counts.test);
  return out;
}

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

Sample synth_one(const SynthOptions& o, int index, std::mt19937_64& rng) {
  const int n = o.size;
  const Resolution res = Resolution::isotropic(o.resolution_m);
  const double x0 = uniform(rng, 0.3, 0.7) * n;
  const double slope = uniform(rng, -0.3, 0.3);
  const double amp = uniform(rng, 0.0, 0.1) * n;
  const double freq = uniform(rng, 0.5, 2.0);
  const double phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  std::vector<int> front_x(n);
  for (int y = 0; y < n; ++y) {
    const double v = x0 + slope * (y - 0.5 * n) +
                     amp * std::sin(2.0 * std::numbers::pi * freq * y / n + phase);
    front_x[y] = std::clamp(static_cast<int>(std::lround(v)), 2, n - 3);
  }
  BinaryMask glacier(n, n, res);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x <= front_x[y]; ++x) glacier.set(x, y, true);
  }

  const double bright = uniform(rng, 0.6, 0.75);
  const double dark = uniform(rng, 0.2, 0.3);
  Raster sar(n, n, res, ValueDomain::kIntensity01);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) sar.at(x, y) = glacier(x, y) ? bright : dark;
  }
  if (o.noise > 0.0) {
    // Clutter blobs at least three pixels clear of the front.
    const int blobs = static_cast<int>(uniform(rng, 2.0, 6.0));
    for (int b = 0; b < blobs; ++b) {
      const int r = static_cast<int>(uniform(rng, 1.0, 0.06 * n + 1.0));
      const int cx = static_cast<int>(uniform(rng, 0.0, n));
      const int cy = static_cast<int>(uniform(rng, 0.0, n));
      for (int y = std::max(0, cy - r); y <= std::min(n - 1, cy + r); ++y) {
        for (int x = std::max(0, cx - r); x <= std::min(n - 1, cx + r); ++x) {
          if ((x - cx) * (x - cx) + (y - cy) * (y - cy) > r * r) continue;
          if (x < front_x[y] + 4) continue;
          sar.at(x, y) = 0.5 * (bright + dark) + 0.1;
        }
      }
    }
    const double shape = 1.0 / (o.noise * o.noise);
    std::gamma_distribution<double> speckle(shape, 1.0 / shape);
    for (double& v : sar.mutable_pixels()) {
      v = std::clamp(v * speckle(rng), 0.0, 1.0);
    }
  }
  // Round-trip through 16-bit so a written and reloaded sample is identical.
  for (double& v : sar.mutable_pixels()) v = std::round(v * 65535.0) / 65535.0;

  const int k = static_cast<int>(rng() % 8);
  Sample s;
  char id[32];
  std::snprintf(id, sizeof(id), "synth_%04d", index);
  s.id = id;
  s.sar = orient(sar, k);
  s.front_line = orient(inner_boundary(glacier), k);
  s.zone_mask = orient(glacier, k);
  s.quality = QualityFactor(1);
  s.resolution_m = o.resolution_m;
  s.sensor = "synthetic";
  s.date = "";
  return s;
}

}  // namespace

std::vector<Sample> synth_generate(const SynthOptions& options) {
  if (options.size < 32) throw ParameterError("synthetic size must be >= 32");
  if (options.count < 0) throw ParameterError("synthetic count must be >= 0");
  if (!(options.noise >= 0.0)) throw ParameterError("noise must be >= 0");
  if (!(options.resolution_m > 0.0)) throw ParameterError("resolution must be > 0");
  std::mt19937_64 rng(options.seed);
  std::vector<Sample> out;
  out.reserve(static_cast<std::size_t>(options.count));
  for (int i = 0; i < options.count; ++i) out.push_back(synth_one(options, i, rng));
  return out;
}

Manifest write_samples(const fs::path& dir, const std::vector<Sample>& samples) {
  fs::create_directories(dir);
  Manifest m;
  m.base_dir = dir;
  for (const auto& s : samples) {
    ManifestRecord r;
    r.id = s.id;
    r.sar_path = s.id + "_sar.pgm";
    r.line_path = s.id + "_line.pgm";
    io::write_intensity_pgm(dir / r.sar_path, s.sar);
    io::write_mask_pgm(dir / r.line_path, s.front_line);
    if (s.zone_mask) {
      r.zone_path = s.id + "_zone.pgm";
      io::write_zone_pgm(dir / r.zone_path, *s.zone_mask);
    }
    r.quality = s.quality;
    r.resolution_m = s.resolution_m;
    r.sensor = s.sensor;
    r.date = s.date;
    m.records.push_back(std::move(r));
  }
  io::atomic_write(dir / "manifest.csv", format_manifest(m));
  return m;
}

}  // namespace frontline

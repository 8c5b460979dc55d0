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

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <set>

#include "frontline/error.hpp"
#include "frontline/io.hpp"
#include "frontline/morphology.hpp"
#include "oracles.hpp"

namespace frontline {
namespace {

namespace fs = std::filesystem;

const Resolution kRes = Resolution::isotropic(20.0);

class TempDir {
 public:
  explicit TempDir(const std::string& name)
      : path_(fs::temp_directory_path() / ("frontline_" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

TEST(Io, PgmRoundTrips) {
  TempDir dir("io");
  std::mt19937_64 rng(1);
  Raster img(7, 5, kRes, ValueDomain::kIntensity01);
  for (double& v : img.mutable_pixels()) v = static_cast<double>(rng() % 65536) / 65535.0;
  io::write_intensity_pgm(dir.path() / "a.pgm", img);
  const Raster back = io::read_intensity_pgm(dir.path() / "a.pgm", kRes);
  for (std::size_t i = 0; i < img.size(); ++i) {
    EXPECT_EQ(back.pixels()[i], img.pixels()[i]);
  }
  // Big-endian samples.
  const std::string bytes = io::read_file(dir.path() / "a.pgm");
  const auto first = static_cast<std::uint16_t>(std::lround(img.pixels()[0] * 65535));
  const std::size_t body = bytes.size() - 2 * img.size();
  EXPECT_EQ(static_cast<unsigned char>(bytes[body]), first >> 8);
  EXPECT_EQ(static_cast<unsigned char>(bytes[body + 1]), first & 0xff);

  const BinaryMask m = testing::random_mask(rng, 9, 4, 0.3);
  io::write_mask_pgm(dir.path() / "m.pgm", m);
  EXPECT_EQ(io::read_mask_pgm(dir.path() / "m.pgm", kRes), m);
  io::write_zone_pgm(dir.path() / "z.pgm", m);
  EXPECT_EQ(io::read_zone_pgm(dir.path() / "z.pgm", kRes), m);
}

TEST(Io, PgmHeaderVariantsAndErrors) {
  TempDir dir("pgm");
  io::atomic_write(dir.path() / "c.pgm", std::string("P5 # comment\n2\n# more\n1 255\n") +
                                             std::string("\x00\x80", 2));
  const auto g = io::read_pgm(dir.path() / "c.pgm");
  EXPECT_EQ(g.width, 2);
  EXPECT_EQ(g.samples[1], 128);
  io::atomic_write(dir.path() / "bad_zone.pgm", std::string("P5 2 1 255\n") + std::string("\x00\x07", 2));
  EXPECT_THROW(io::read_zone_pgm(dir.path() / "bad_zone.pgm", kRes), DatasetError);
  // 0 and 128 are valid zone values; 128 is not glacier.
  io::atomic_write(dir.path() / "z.pgm", std::string("P5 2 1 255\n") + std::string("\x80\xff", 2));
  const BinaryMask z = io::read_zone_pgm(dir.path() / "z.pgm", kRes);
  EXPECT_FALSE(z(0, 0));
  EXPECT_TRUE(z(1, 0));
  io::atomic_write(dir.path() / "t.pgm", std::string("P5 4 4 255\n") + "ab");
  EXPECT_THROW(io::read_pgm(dir.path() / "t.pgm"), DatasetError);
  io::atomic_write(dir.path() / "p2.pgm", "P2 1 1 255\n0\n");
  EXPECT_THROW(io::read_pgm(dir.path() / "p2.pgm"), DatasetError);
  EXPECT_THROW(io::read_pgm(dir.path() / "missing.pgm"), DatasetError);
}

TEST(Io, FloatRasterAndPng) {
  TempDir dir("float");
  Raster r(3, 2, Resolution{10.0, 12.5}, ValueDomain::kDistance01);
  r.at(1, 1) = 0.123456789;
  r.at(2, 0) = 1.0;
  io::write_float_raster(dir.path() / "d.f32", r);
  EXPECT_TRUE(fs::exists(dir.path() / "d.json"));
  const Raster back = io::read_float_raster(dir.path() / "d.f32");
  EXPECT_EQ(back.width(), 3);
  EXPECT_EQ(back.resolution(), r.resolution());
  EXPECT_EQ(back.domain(), ValueDomain::kDistance01);
  EXPECT_EQ(back(1, 1), static_cast<double>(static_cast<float>(0.123456789)));
  EXPECT_EQ(fs::file_size(dir.path() / "d.f32"), 24u);

  BinaryMask pred(2, 2), truth(2, 2);
  pred.set(0, 0, true);
  pred.set(1, 1, true);
  truth.set(1, 1, true);
  truth.set(1, 0, true);
  const auto px = io::overlay_pixels(pred, truth);
  EXPECT_EQ(px[0], io::kOverlayPrediction);
  EXPECT_EQ(px[1], io::kOverlayTruth);
  EXPECT_EQ(px[2], io::kOverlayBackground);
  EXPECT_EQ(px[3], io::kOverlayBoth);
  io::write_png(dir.path() / "o.png", 2, 2, px);
  int w = 0;
  int h = 0;
  EXPECT_EQ(io::read_png(dir.path() / "o.png", &w, &h), px);
  EXPECT_EQ(w, 2);
}

TEST(Quality, Factors) {
  EXPECT_EQ(*QualityFactor(1).sigma_f(), 70.0);
  EXPECT_EQ(*QualityFactor(5).sigma_f(), 450.0);
  EXPECT_FALSE(QualityFactor(6).sigma_f().has_value());
  EXPECT_THROW(QualityFactor(0), ParameterError);
  EXPECT_THROW(QualityFactor(7), ParameterError);
}

std::string manifest_text(const std::vector<std::pair<std::string, int>>& rows) {
  std::string s = std::string(kManifestHeader) + "\n";
  for (const auto& [id, q] : rows) {
    s += id + ",s.pgm,l.pgm,," + std::to_string(q) + ",20,S1,2020-01-01\n";
  }
  return s;
}

TEST(Manifest, ParsingAndErrors) {
  EXPECT_EQ(parse_manifest("", "/", false).size(), 0u);
  EXPECT_EQ(parse_manifest(std::string(kManifestHeader) + "\n", "/", false).size(), 0u);
  const Manifest m = parse_manifest(manifest_text({{"a", 1}, {"b", 6}}), "/base", false);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m.records[1].quality.value(), 6);
  EXPECT_EQ(m.records[0].resolution_m, 20.0);
  EXPECT_TRUE(m.records[0].zone_path.empty());
  // Round trip through the formatter.
  const Manifest again = parse_manifest(format_manifest(m), "/base", false);
  EXPECT_EQ(format_manifest(again), format_manifest(m));

  try {
    parse_manifest(manifest_text({{"a", 1}, {"x", 2}, {"a", 3}}), "/", false);
    FAIL();
  } catch (const DatasetError& e) {
    EXPECT_NE(std::string(e.what()).find("row 4"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("'a'"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_manifest(manifest_text({{"a", 9}}), "/", false), DatasetError);
  EXPECT_THROW(parse_manifest("id,foo\n", "/", false), DatasetError);
  try {
    parse_manifest(manifest_text({{"a", 1}}), "/nonexistent", true);
    FAIL();
  } catch (const DatasetError& e) {
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos);
  }
  // Quoted fields may hold commas.
  const std::string quoted = std::string(kManifestHeader) +
                             "\n\"x,1\",s.pgm,l.pgm,,2,20,\"S1, IW\",2020\n";
  const Manifest q = parse_manifest(quoted, "/", false);
  EXPECT_EQ(q.records[0].id, "x,1");
  EXPECT_EQ(q.records[0].sensor, "S1, IW");
}

TEST(Manifest, QualityFilter) {
  const Manifest m =
      parse_manifest(manifest_text({{"a", 3}, {"b", 6}, {"c", 1}, {"d", 1}}), "/", false);
  const Manifest five = filter_by_quality(m);
  ASSERT_EQ(five.size(), 3u);
  EXPECT_EQ(five.records[1].id, "c");
  EXPECT_EQ(filter_by_quality(m, 6).size(), 4u);
  const Manifest one = filter_by_quality(m, 1);
  ASSERT_EQ(one.size(), 2u);
  EXPECT_EQ(one.records[0].id, "c");
  EXPECT_EQ(one.records[1].id, "d");
}

TEST(Manifest, Split) {
  std::vector<std::pair<std::string, int>> rows;
  for (int i = 0; i < 30; ++i) rows.push_back({"s" + std::to_string(i), 1});
  const Manifest m = parse_manifest(manifest_text(rows), "/", false);
  const auto a = split(m, {20, 6, 4}, 9);
  const auto b = split(m, {20, 6, 4}, 9);
  EXPECT_EQ(format_manifest(a.train), format_manifest(b.train));
  std::set<std::string> seen;
  for (const Manifest* part : {&a.train, &a.val, &a.test}) {
    for (const auto& r : part->records) EXPECT_TRUE(seen.insert(r.id).second);
  }
  EXPECT_EQ(seen.size(), 30u);
  EXPECT_EQ(a.val.size(), 6u);
  EXPECT_NE(format_manifest(split(m, {20, 6, 4}, 10).train), format_manifest(a.train));
  EXPECT_EQ(split(m, {30, 0, 0}, 1).train.size(), 30u);
  EXPECT_THROW(split(m, {20, 6, 5}, 1), ParameterError);
}

TEST(Augment, DihedralGroup) {
  // Asymmetric pattern: distinct values everywhere.
  Raster img(5, 5, kRes, ValueDomain::kIntensity01);
  for (std::size_t i = 0; i < img.size(); ++i) img.mutable_pixels()[i] = i / 24.0;
  for (int k = 0; k < 8; ++k) {
    for (int j = 0; j < k; ++j) {
      const Raster a = orient(img, k);
      const Raster b = orient(img, j);
      EXPECT_FALSE(std::equal(a.pixels().begin(), a.pixels().end(), b.pixels().begin()))
          << k << " vs " << j;
    }
  }
  auto same = [](const Raster& a, const Raster& b) {
    return std::equal(a.pixels().begin(), a.pixels().end(), b.pixels().begin());
  };
  EXPECT_TRUE(same(orient(orient(img, 2), 2), img));
  EXPECT_TRUE(same(orient(orient(img, 4), 4), img));
  EXPECT_TRUE(same(orient(orient(orient(orient(img, 1), 1), 1), 1), img));
  // One quarter turn counter-clockwise moves the top-right corner to the top-left.
  EXPECT_EQ(orient(img, 1)(0, 0), img(4, 0));
  EXPECT_THROW(orient(Raster(4, 3), 1), DimensionError);
  EXPECT_THROW(orient(img, 8), ParameterError);

  SynthOptions opt;
  opt.count = 1;
  opt.size = 32;
  const Sample s = synth_generate(opt)[0];
  const auto aug = augment_eightfold(s);
  ASSERT_EQ(aug.size(), 8u);
  std::set<std::string> ids;
  for (int k = 0; k < 8; ++k) {
    ids.insert(aug[k].id);
    EXPECT_EQ(aug[k].front_line, orient(s.front_line, k));
    EXPECT_EQ(*aug[k].zone_mask, orient(*s.zone_mask, k));
    EXPECT_TRUE(same(aug[k].sar, orient(s.sar, k)));
    EXPECT_EQ(aug[k].front_line.count(), s.front_line.count());
  }
  EXPECT_EQ(ids.size(), 8u);
}

bool spans(const BinaryMask& line) {
  // Some component touches two opposite image edges.
  const auto lab = connected_components(line, Connectivity::kEight);
  const int w = line.width();
  const int h = line.height();
  for (int c = 1; c <= lab.count(); ++c) {
    bool left = false, right = false, top = false, bottom = false;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (lab.labels[static_cast<std::size_t>(y) * w + x] != c) continue;
        left |= x == 0;
        right |= x == w - 1;
        top |= y == 0;
        bottom |= y == h - 1;
      }
    }
    if ((left && right) || (top && bottom)) return true;
  }
  return false;
}

TEST(Synth, GeneratedScenes) {
  SynthOptions opt;
  opt.count = 20;
  opt.size = 48;
  opt.seed = 5;
  const auto a = synth_generate(opt);
  const auto b = synth_generate(opt);
  ASSERT_EQ(a.size(), 20u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Sample& s = a[i];
    s.validate();
    EXPECT_EQ(s.id, b[i].id);
    EXPECT_TRUE(std::equal(s.sar.pixels().begin(), s.sar.pixels().end(),
                           b[i].sar.pixels().begin()));
    EXPECT_EQ(s.front_line, b[i].front_line);
    EXPECT_EQ(testing::flood_fill_components(s.front_line, true), 1) << s.id;
    EXPECT_TRUE(spans(s.front_line)) << s.id;
    EXPECT_TRUE(is_subset(s.front_line, *s.zone_mask));
    EXPECT_EQ(s.sar.domain(), ValueDomain::kIntensity01);
    EXPECT_EQ(s.resolution_m, 20.0);
  }
  EXPECT_THROW(synth_generate({1, 16, 0, 0.3, 20.0}), ParameterError);
}

TEST(Synth, NoiselessScenesAreTwoConstantRegions) {
  SynthOptions opt;
  opt.count = 5;
  opt.size = 40;
  opt.noise = 0.0;
  for (const Sample& s : synth_generate(opt)) {
    std::set<double> inside, outside;
    for (std::size_t i = 0; i < s.sar.size(); ++i) {
      (s.zone_mask->bits()[i] ? inside : outside).insert(s.sar.pixels()[i]);
    }
    ASSERT_EQ(inside.size(), 1u);
    ASSERT_EQ(outside.size(), 1u);
    EXPECT_GT(*inside.begin(), *outside.begin());
    EXPECT_EQ(s.front_line, inner_boundary(*s.zone_mask));
  }
}

TEST(Synth, WriteAndLoadManifest) {
  TempDir dir("synth");
  SynthOptions opt;
  opt.count = 3;
  opt.size = 32;
  const auto samples = synth_generate(opt);
  write_samples(dir.path(), samples);
  const Manifest m = load_manifest(dir.path() / "manifest.csv");
  ASSERT_EQ(m.size(), 3u);
  const auto loaded = load_samples(m);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(loaded[i].id, samples[i].id);
    EXPECT_EQ(loaded[i].front_line, samples[i].front_line);
    EXPECT_EQ(*loaded[i].zone_mask, *samples[i].zone_mask);
    for (std::size_t p = 0; p < loaded[i].sar.size(); ++p) {
      ASSERT_EQ(loaded[i].sar.pixels()[p], samples[i].sar.pixels()[p]);
    }
  }
  fs::remove(dir.path() / (samples[1].id + "_line.pgm"));
  EXPECT_THROW(load_manifest(dir.path() / "manifest.csv"), DatasetError);
}

}  // namespace
}  // namespace frontline

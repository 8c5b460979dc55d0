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

#include "frontline/io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

#include "frontline/error.hpp"
#include "json.hpp"

namespace frontline::io {

namespace fs = std::filesystem;

void atomic_write(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DatasetError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DatasetError("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw DatasetError("cannot rename " + tmp.string() + ": " + ec.message());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string next_token(const std::string& data, std::size_t& pos) {
  while (pos < data.size()) {
    const char c = data[pos];
    if (c == '#') {
      while (pos < data.size() && data[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else {
      break;
    }
  }
  const std::size_t start = pos;
  while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos])) &&
         data[pos] != '#') {
    ++pos;
  }
  return data.substr(start, pos - start);
}

int parse_positive(const std::string& token, const fs::path& path) {
  int v = 0;
  try {
    std::size_t used = 0;
    v = std::stoi(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
  } catch (const std::exception&) {
    throw DatasetError(path.string() + ": bad PGM header field '" + token + "'");
  }
  if (v <= 0) throw DatasetError(path.string() + ": non-positive PGM header field");
  return v;
}

}  // namespace

GrayImage read_pgm(const fs::path& path) {
  const std::string data = read_file(path);
  std::size_t pos = 0;
  if (next_token(data, pos) != "P5") {
    throw DatasetError(path.string() + ": not a binary PGM (P5) file");
  }
  GrayImage img;
  img.width = parse_positive(next_token(data, pos), path);
  img.height = parse_positive(next_token(data, pos), path);
  img.maxval = parse_positive(next_token(data, pos), path);
  if (img.maxval > 65535) throw DatasetError(path.string() + ": maxval > 65535");
  // Exactly one whitespace byte separates the header from the raster.
  if (pos >= data.size() || !std::isspace(static_cast<unsigned char>(data[pos]))) {
    throw DatasetError(path.string() + ": truncated PGM header");
  }
  ++pos;
  const std::size_t count = static_cast<std::size_t>(img.width) * img.height;
  const std::size_t bytes_per = img.maxval > 255 ? 2 : 1;
  if (data.size() - pos < count * bytes_per) {
    throw DatasetError(path.string() + ": truncated PGM raster");
  }
  img.samples.resize(count);
  const auto* p = reinterpret_cast<const unsigned char*>(data.data() + pos);
  for (std::size_t i = 0; i < count; ++i) {
    img.samples[i] = bytes_per == 2
                         ? static_cast<std::uint16_t>((p[2 * i] << 8) | p[2 * i + 1])
                         : p[i];
    if (img.samples[i] > img.maxval) {
      throw DatasetError(path.string() + ": sample exceeds maxval");
    }
  }
  return img;
}

std::string encode_pgm(const GrayImage& image) {
  std::string out = "P5\n" + std::to_string(image.width) + " " +
                    std::to_string(image.height) + "\n" +
                    std::to_string(image.maxval) + "\n";
  const bool wide = image.maxval > 255;
  out.reserve(out.size() + image.samples.size() * (wide ? 2 : 1));
  for (std::uint16_t v : image.samples) {
    if (wide) out.push_back(static_cast<char>(v >> 8));
    out.push_back(static_cast<char>(v & 0xff));
  }
  return out;
}

void write_pgm(const fs::path& path, const GrayImage& image) {
  atomic_write(path, encode_pgm(image));
}

Raster read_intensity_pgm(const fs::path& path, Resolution resolution) {
  GrayImage img = read_pgm(path);
  if (img.maxval == 65535) {
    return normalize_from_u16(img.samples, img.width, img.height, resolution);
  }
  std::vector<double> px(img.samples.size());
  for (std::size_t i = 0; i < px.size(); ++i) {
    px[i] = static_cast<double>(img.samples[i]) / img.maxval;
  }
  return Raster(img.width, img.height, std::move(px), resolution,
                ValueDomain::kIntensity01);
}

void write_intensity_pgm(const fs::path& path, const Raster& image) {
  GrayImage img{image.width(), image.height(), 65535, {}};
  img.samples.reserve(image.size());
  for (double v : image.pixels()) {
    img.samples.push_back(
        static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, 1.0) * 65535.0)));
  }
  write_pgm(path, img);
}

BinaryMask read_mask_pgm(const fs::path& path, Resolution resolution) {
  const GrayImage img = read_pgm(path);
  BinaryMask mask(img.width, img.height, resolution);
  for (std::size_t i = 0; i < img.samples.size(); ++i) {
    mask.mutable_bits()[i] = img.samples[i] != 0 ? 1 : 0;
  }
  return mask;
}

void write_mask_pgm(const fs::path& path, const BinaryMask& mask) {
  GrayImage img{mask.width(), mask.height(), 255, {}};
  img.samples.reserve(mask.size());
  for (auto b : mask.bits()) img.samples.push_back(b ? 255 : 0);
  write_pgm(path, img);
}

BinaryMask read_zone_pgm(const fs::path& path, Resolution resolution) {
  const GrayImage img = read_pgm(path);
  if (img.maxval > 255) throw DatasetError(path.string() + ": zone masks are 8-bit");
  BinaryMask mask(img.width, img.height, resolution);
  for (std::size_t i = 0; i < img.samples.size(); ++i) {
    const auto v = img.samples[i];
    if (v != kZoneMelange && v != kZoneRock && v != kZoneGlacier) {
      throw DatasetError(path.string() + ": unexpected zone value " +
                         std::to_string(v));
    }
    mask.mutable_bits()[i] = v == kZoneGlacier ? 1 : 0;
  }
  return mask;
}

void write_zone_pgm(const fs::path& path, const BinaryMask& glacier) {
  GrayImage img{glacier.width(), glacier.height(), 255, {}};
  img.samples.reserve(glacier.size());
  for (auto b : glacier.bits()) img.samples.push_back(b ? kZoneGlacier : kZoneMelange);
  write_pgm(path, img);
}

fs::path sidecar_path(const fs::path& path) {
  fs::path p = path;
  p.replace_extension(".json");
  return p;
}

void write_float_raster(const fs::path& path, const Raster& image) {
  std::string bytes(image.size() * 4, '\0');
  std::size_t o = 0;
  for (double v : image.pixels()) {
    std::uint32_t u = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    for (int b = 0; b < 4; ++b) bytes[o++] = static_cast<char>((u >> (8 * b)) & 0xff);
  }
  const Resolution& r = image.resolution();
  nlohmann::ordered_json side;
  side["width"] = image.width();
  side["height"] = image.height();
  side["resolution_m"] = r.geometric_mean();
  side["resolution_x_m"] = r.x;
  side["resolution_y_m"] = r.y;
  side["value_domain"] = std::string(to_string(image.domain()));
  atomic_write(path, bytes);
  atomic_write(sidecar_path(path), side.dump(2) + "\n");
}

Raster read_float_raster(const fs::path& path) {
  nlohmann::json side;
  try {
    side = nlohmann::json::parse(read_file(sidecar_path(path)));
  } catch (const nlohmann::json::exception& e) {
    throw DatasetError(sidecar_path(path).string() + ": " + e.what());
  }
  const int w = side.at("width").get<int>();
  const int h = side.at("height").get<int>();
  const double res = side.at("resolution_m").get<double>();
  const Resolution r{side.value("resolution_x_m", res), side.value("resolution_y_m", res)};
  const ValueDomain domain =
      value_domain_from_string(side.value("value_domain", std::string("raw")));
  const std::string bytes = read_file(path);
  if (w < 1 || h < 1 || bytes.size() != static_cast<std::size_t>(w) * h * 4) {
    throw DatasetError(path.string() + ": size does not match its sidecar");
  }
  std::vector<double> px(static_cast<std::size_t>(w) * h);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  for (std::size_t i = 0; i < px.size(); ++i) {
    std::uint32_t u = 0;
    for (int b = 0; b < 4; ++b) u |= static_cast<std::uint32_t>(p[4 * i + b]) << (8 * b);
    px[i] = std::bit_cast<float>(u);
  }
  return Raster(w, h, std::move(px), r, domain);
}

std::vector<Rgb> overlay_pixels(const BinaryMask& prediction,
                                const BinaryMask& truth) {
  if (!prediction.same_shape(truth)) {
    throw DimensionError("overlay: prediction and ground truth shapes differ");
  }
  std::vector<Rgb> px(prediction.size());
  auto p = prediction.bits();
  auto t = truth.bits();
  for (std::size_t i = 0; i < px.size(); ++i) {
    if (p[i] && t[i]) {
      px[i] = kOverlayBoth;
    } else if (p[i]) {
      px[i] = kOverlayPrediction;
    } else if (t[i]) {
      px[i] = kOverlayTruth;
    } else {
      px[i] = kOverlayBackground;
    }
  }
  return px;
}

namespace {

void png_append(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::string*>(png_get_io_ptr(png));
  out->append(reinterpret_cast<const char*>(data), length);
}

void png_flush(png_structp) {}

[[noreturn]] void png_fail(png_structp, png_const_charp message) {
  throw DatasetError(std::string("png: ") + message);
}

}  // namespace

void write_png(const fs::path& path, int width, int height,
               const std::vector<Rgb>& pixels) {
  if (pixels.size() != static_cast<std::size_t>(width) * height) {
    throw DimensionError("png pixel count does not match dimensions");
  }
  std::string out;
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, nullptr);
  png_infop info = png_create_info_struct(png);
  try {
    png_set_write_fn(png, &out, png_append, png_flush);
    png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_byte> row(static_cast<std::size_t>(width) * 3);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const Rgb& c = pixels[static_cast<std::size_t>(y) * width + x];
        row[3 * x] = c.r;
        row[3 * x + 1] = c.g;
        row[3 * x + 2] = c.b;
      }
      png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
  } catch (...) {
    png_destroy_write_struct(&png, &info);
    throw;
  }
  png_destroy_write_struct(&png, &info);
  atomic_write(path, out);
}

std::vector<Rgb> read_png(const fs::path& path, int* width, int* height) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
    throw DatasetError("cannot read png " + path.string());
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    png_image_free(&image);
    throw DatasetError("cannot decode png " + path.string());
  }
  *width = static_cast<int>(image.width);
  *height = static_cast<int>(image.height);
  std::vector<Rgb> px(static_cast<std::size_t>(*width) * *height);
  for (std::size_t i = 0; i < px.size(); ++i) {
    px[i] = {buffer[3 * i], buffer[3 * i + 1], buffer[3 * i + 2]};
  }
  return px;
}

}  // namespace frontline::io

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

#include "frontline/distmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "frontline/error.hpp"

namespace frontline {

DecayParam::DecayParam(double gamma) : gamma_(gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ParameterError("decay parameter must be positive, got " +
                         std::to_string(gamma));
  }
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One-dimensional squared distance transform of a sampled function f
// (Felzenszwalb & Huttenlocher). `v` and `z` are scratch buffers.
void squared_dt_1d(const std::vector<double>& f, std::vector<double>& d,
                   std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    auto intersect = [&](int p) {
      return ((f[q] + static_cast<double>(q) * q) -
              (f[p] + static_cast<double>(p) * p)) /
             (2.0 * (q - p));
    };
    double s = intersect(v[k]);
    // z[0] is -inf, so k never drops below zero.
    while (s <= z[k]) {
      --k;
      s = intersect(v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  if (k < 0) {
    std::fill(d.begin(), d.end(), kInf);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double dq = q - v[j];
    d[q] = dq * dq + f[v[j]];
  }
}

}  // namespace

Raster euclidean_distance_transform(const BinaryMask& front) {
  if (!front.any()) {
    throw NoFrontError("no front present: distance transform needs at "
                       "least one front pixel");
  }
  const int w = front.width();
  const int h = front.height();
  std::vector<double> sq(static_cast<std::size_t>(w) * h);
  const int n = std::max(w, h);
  std::vector<double> f(n), d(n), z(n + 1);
  std::vector<int> v(n);

  // Columns.
  f.resize(h);
  d.resize(h);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) f[y] = front(x, y) ? 0.0 : kInf;
    squared_dt_1d(f, d, v, z);
    for (int y = 0; y < h; ++y) sq[static_cast<std::size_t>(y) * w + x] = d[y];
  }
  // Rows.
  f.resize(w);
  d.resize(w);
  for (int y = 0; y < h; ++y) {
    double* row = sq.data() + static_cast<std::size_t>(y) * w;
    std::copy(row, row + w, f.begin());
    squared_dt_1d(f, d, v, z);
    for (int x = 0; x < w; ++x) row[x] = std::sqrt(d[x]);
  }
  return Raster(w, h, std::move(sq), front.resolution(), ValueDomain::kRaw);
}

Raster normalize_distance_map(const Raster& distances, DecayParam gamma) {
  const auto px = distances.pixels();
  if (px.empty()) throw DimensionError("empty distance map");
  double max_d = 0.0;
  for (double v : px) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw DomainError("distances must be finite and non-negative");
    }
    max_d = std::max(max_d, v);
  }
  std::vector<double> out(px.size(), 1.0);
  if (max_d > 0.0) {
    for (std::size_t i = 0; i < px.size(); ++i) {
      out[i] = std::pow(1.0 - px[i] / max_d, gamma.value());
    }
  }
  return Raster(distances.width(), distances.height(), std::move(out),
                distances.resolution(), ValueDomain::kDistance01);
}

Raster front_to_distance_target(const BinaryMask& front, DecayParam gamma) {
  return normalize_distance_map(euclidean_distance_transform(front), gamma);
}

}  // namespace frontline

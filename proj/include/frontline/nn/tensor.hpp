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

#ifndef FRONTLINE_NN_TENSOR_HPP_
#define FRONTLINE_NN_TENSOR_HPP_

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "frontline/error.hpp"

namespace frontline::nn {

// Dense N x C x H x W grid, row-major within each plane.
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;
  Tensor(int n, int c, int h, int w, T fill = T(0)) : shape_{n, c, h, w} {
    for (int d : shape_) {
      if (d < 0) throw DimensionError("negative tensor dimension");
    }
    values_.assign(static_cast<std::size_t>(n) * c * h * w, fill);
  }

  int n() const { return shape_[0]; }
  int c() const { return shape_[1]; }
  int h() const { return shape_[2]; }
  int w() const { return shape_[3]; }
  const std::array<int, 4>& shape() const { return shape_; }
  std::size_t size() const { return values_.size(); }
  std::size_t plane_size() const {
    return static_cast<std::size_t>(shape_[2]) * shape_[3];
  }

  T* data() { return values_.data(); }
  const T* data() const { return values_.data(); }
  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }

  T* plane(int n, int c) {
    return values_.data() +
           (static_cast<std::size_t>(n) * shape_[1] + c) * plane_size();
  }
  const T* plane(int n, int c) const {
    return values_.data() +
           (static_cast<std::size_t>(n) * shape_[1] + c) * plane_size();
  }
  // Start of sample n (C planes).
  T* sample(int n) { return plane(n, 0); }
  const T* sample(int n) const { return plane(n, 0); }

  T& operator()(int n, int c, int y, int x) {
    return plane(n, c)[static_cast<std::size_t>(y) * shape_[3] + x];
  }
  T operator()(int n, int c, int y, int x) const {
    return plane(n, c)[static_cast<std::size_t>(y) * shape_[3] + x];
  }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  void fill(T v) { std::fill(values_.begin(), values_.end(), v); }

  std::string shape_string() const {
    return "(" + std::to_string(shape_[0]) + "," + std::to_string(shape_[1]) +
           "," + std::to_string(shape_[2]) + "," + std::to_string(shape_[3]) +
           ")";
  }

 private:
  std::array<int, 4> shape_{0, 0, 0, 0};
  std::vector<T> values_;
};

template <typename T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b,
                        const char* what) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(what) + ": shape " + a.shape_string() +
                         " vs " + b.shape_string());
  }
}

}  // namespace frontline::nn

#endif  // FRONTLINE_NN_TENSOR_HPP_

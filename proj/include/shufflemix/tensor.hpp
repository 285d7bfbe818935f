/**
 * Copyright 2026 The ShuffleMix Lab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SHUFFLEMIX_TENSOR_HPP
#define SHUFFLEMIX_TENSOR_HPP

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace shufflemix {

/// (batch, channels, height, width). Fully-connected activations use h = w = 1.
struct Shape {
  std::size_t n = 1;
  std::size_t c = 1;
  std::size_t h = 1;
  std::size_t w = 1;

  std::size_t numel() const { return n * c * h * w; }
  std::size_t sample_size() const { return c * h * w; }
  std::size_t plane() const { return h * w; }
  Shape with_batch(std::size_t batch) const { return {batch, c, h, w}; }

  friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& s);

/// Dense row-major rank-4 tensor of doubles, channel on the second axis.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  const std::vector<double>& values() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::size_t index(std::size_t n, std::size_t c, std::size_t y = 0,
                    std::size_t x = 0) const {
    return ((n * shape_.c + c) * shape_.h + y) * shape_.w + x;
  }
  double& at(std::size_t n, std::size_t c, std::size_t y = 0, std::size_t x = 0) {
    return data_[index(n, c, y, x)];
  }
  double at(std::size_t n, std::size_t c, std::size_t y = 0, std::size_t x = 0) const {
    return data_[index(n, c, y, x)];
  }

  /// Contiguous view of one sample (all channels and pixels).
  std::span<double> sample(std::size_t n);
  std::span<const double> sample(std::size_t n) const;

  /// Contiguous view of one channel plane of one sample.
  std::span<double> channel(std::size_t n, std::size_t c);
  std::span<const double> channel(std::size_t n, std::size_t c) const;

  bool all_finite() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_{0, 0, 0, 0};
  std::vector<double> data_;
};

/// New tensor holding rows `indices` of `src`, in order.
Tensor gather_rows(const Tensor& src, std::span<const std::size_t> indices);

/// Writes row i of `rows` into row indices[i] of `dst`.
void scatter_rows(Tensor& dst, const Tensor& rows, std::span<const std::size_t> indices);

/// dst[indices[i]] += rows[i], row-wise.
void scatter_add_rows(Tensor& dst, const Tensor& rows, std::span<const std::size_t> indices);

void require_same_shape(const Tensor& a, const Tensor& b, const char* what);

}  // namespace shufflemix

#endif  // SHUFFLEMIX_TENSOR_HPP

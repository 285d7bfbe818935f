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

#include "shufflemix/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "shufflemix/errors.hpp"

namespace shufflemix {

std::string to_string(const Shape& s) {
  return "[" + std::to_string(s.n) + "," + std::to_string(s.c) + "," + std::to_string(s.h) +
         "," + std::to_string(s.w) + "]";
}

Tensor::Tensor(Shape shape, double fill) : shape_(shape), data_(shape.numel(), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(shape), data_(std::move(data)) {
  if (data_.size() != shape_.numel()) {
    throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                         " does not match shape " + to_string(shape_));
  }
}

std::span<double> Tensor::sample(std::size_t n) {
  const std::size_t s = shape_.sample_size();
  return std::span<double>(data_).subspan(n * s, s);
}

std::span<const double> Tensor::sample(std::size_t n) const {
  const std::size_t s = shape_.sample_size();
  return std::span<const double>(data_).subspan(n * s, s);
}

std::span<double> Tensor::channel(std::size_t n, std::size_t c) {
  const std::size_t p = shape_.plane();
  return std::span<double>(data_).subspan(index(n, c), p);
}

std::span<const double> Tensor::channel(std::size_t n, std::size_t c) const {
  const std::size_t p = shape_.plane();
  return std::span<const double>(data_).subspan(index(n, c), p);
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Tensor gather_rows(const Tensor& src, std::span<const std::size_t> indices) {
  Tensor out(src.shape().with_batch(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= src.shape().n) {
      throw DimensionError("row index " + std::to_string(indices[i]) + " out of range for " +
                           to_string(src.shape()));
    }
    auto from = src.sample(indices[i]);
    std::copy(from.begin(), from.end(), out.sample(i).begin());
  }
  return out;
}

void scatter_rows(Tensor& dst, const Tensor& rows, std::span<const std::size_t> indices) {
  if (rows.shape().n != indices.size() ||
      rows.shape().sample_size() != dst.shape().sample_size()) {
    throw DimensionError("scatter_rows: " + to_string(rows.shape()) + " into " +
                         to_string(dst.shape()));
  }
  for (std::size_t i = 0; i < indices.size(); ++i) {
    auto from = rows.sample(i);
    std::copy(from.begin(), from.end(), dst.sample(indices[i]).begin());
  }
}

void scatter_add_rows(Tensor& dst, const Tensor& rows, std::span<const std::size_t> indices) {
  if (rows.shape().n != indices.size() ||
      rows.shape().sample_size() != dst.shape().sample_size()) {
    throw DimensionError("scatter_add_rows: " + to_string(rows.shape()) + " into " +
                         to_string(dst.shape()));
  }
  for (std::size_t i = 0; i < indices.size(); ++i) {
    auto from = rows.sample(i);
    auto to = dst.sample(indices[i]);
    for (std::size_t j = 0; j < from.size(); ++j) to[j] += from[j];
  }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(what) + ": shape mismatch " + to_string(a.shape()) +
                         " vs " + to_string(b.shape()));
  }
}

}  // namespace shufflemix

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

#ifndef SHUFFLEMIX_LAYERS_HPP
#define SHUFFLEMIX_LAYERS_HPP

#include <cstddef>
#include <string_view>
#include <vector>

#include "shufflemix/tensor.hpp"

namespace shufflemix {

enum class LayerKind { kLinear, kConv3x3, kRelu, kGlobalAvgPool };

std::string_view to_string(LayerKind kind);
LayerKind layer_kind_from_string(std::string_view name);

/// Parameters of one layer.
///
/// linear:  weights [out][in], bias [out]
/// conv3x3: weights [out][in][3][3], bias [out]; stride 1, zero padding 1
/// relu, global-average-pool: no parameters
struct LayerParams {
  LayerKind kind = LayerKind::kRelu;
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  static LayerParams linear(std::size_t in, std::size_t out);
  static LayerParams conv3x3(std::size_t in, std::size_t out);
  static LayerParams relu() { return {LayerKind::kRelu, 0, 0, {}, {}}; }
  static LayerParams global_avg_pool() { return {LayerKind::kGlobalAvgPool, 0, 0, {}, {}}; }

  bool has_parameters() const { return !weights.empty() || !bias.empty(); }
  std::size_t parameter_count() const { return weights.size() + bias.size(); }

  /// Throws DimensionError when weight/bias sizes disagree with the channel counts.
  void validate() const;

  friend bool operator==(const LayerParams&, const LayerParams&) = default;
};

/// Gradients of a layer with respect to its input and its own parameters.
struct LayerGrads {
  Tensor input;
  std::vector<double> weights;
  std::vector<double> bias;
};

Tensor linear_forward(const Tensor& input, const LayerParams& params);
LayerGrads linear_backward(const Tensor& input, const LayerParams& params,
                           const Tensor& grad_out);

Tensor conv_forward(const Tensor& input, const LayerParams& params);
LayerGrads conv_backward(const Tensor& input, const LayerParams& params, const Tensor& grad_out);

Tensor relu_forward(const Tensor& input);
Tensor relu_backward(const Tensor& input, const Tensor& grad_out);

Tensor global_avg_pool_forward(const Tensor& input);
Tensor global_avg_pool_backward(const Tensor& input, const Tensor& grad_out);

/// Dispatch on params.kind.
Tensor layer_forward(const Tensor& input, const LayerParams& params);
LayerGrads layer_backward(const Tensor& input, const LayerParams& params, const Tensor& grad_out);

}  // namespace shufflemix

#endif  // SHUFFLEMIX_LAYERS_HPP

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

#include "shufflemix/layers.hpp"

#include <algorithm>
#include <string>

#include "shufflemix/errors.hpp"

namespace shufflemix {

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::kLinear: return "linear";
    case LayerKind::kConv3x3: return "conv3x3";
    case LayerKind::kRelu: return "relu";
    case LayerKind::kGlobalAvgPool: return "global-average-pool";
  }
  return "unknown";
}

LayerKind layer_kind_from_string(std::string_view name) {
  if (name == "linear") return LayerKind::kLinear;
  if (name == "conv3x3") return LayerKind::kConv3x3;
  if (name == "relu") return LayerKind::kRelu;
  if (name == "global-average-pool") return LayerKind::kGlobalAvgPool;
  throw FormatError("unknown layer kind '" + std::string(name) + "'");
}

LayerParams LayerParams::linear(std::size_t in, std::size_t out) {
  return {LayerKind::kLinear, in, out, std::vector<double>(in * out, 0.0),
          std::vector<double>(out, 0.0)};
}

LayerParams LayerParams::conv3x3(std::size_t in, std::size_t out) {
  return {LayerKind::kConv3x3, in, out, std::vector<double>(in * out * 9, 0.0),
          std::vector<double>(out, 0.0)};
}

void LayerParams::validate() const {
  std::size_t expected = 0;
  switch (kind) {
    case LayerKind::kLinear: expected = in_channels * out_channels; break;
    case LayerKind::kConv3x3: expected = in_channels * out_channels * 9; break;
    default:
      if (has_parameters()) {
        throw DimensionError(std::string(to_string(kind)) + " layer carries parameters");
      }
      return;
  }
  if (weights.size() != expected || bias.size() != out_channels) {
    throw DimensionError(std::string(to_string(kind)) + " layer " +
                         std::to_string(in_channels) + "->" + std::to_string(out_channels) +
                         " has " + std::to_string(weights.size()) + " weights and " +
                         std::to_string(bias.size()) + " biases");
  }
}

namespace {

void require_kind(const LayerParams& p, LayerKind kind) {
  if (p.kind != kind) {
    throw ParameterError("expected " + std::string(to_string(kind)) + " layer, got " +
                         std::string(to_string(p.kind)));
  }
  p.validate();
}

void require_input(const Tensor& input, const LayerParams& p) {
  if (input.shape().c != p.in_channels) {
    throw DimensionError("input " + to_string(input.shape()) + " incompatible with " +
                         std::string(to_string(p.kind)) + " layer expecting " +
                         std::to_string(p.in_channels) + " channels");
  }
}

void require_grad(const Tensor& grad_out, Shape expected) {
  if (grad_out.shape() != expected) {
    throw DimensionError("gradient " + to_string(grad_out.shape()) + " does not match output " +
                         to_string(expected));
  }
}

}  // namespace

Tensor linear_forward(const Tensor& input, const LayerParams& params) {
  require_kind(params, LayerKind::kLinear);
  const Shape& s = input.shape();
  if (s.h != 1 || s.w != 1) {
    throw DimensionError("linear layer needs 1x1 spatial input, got " + to_string(s) +
                         " for weights [" + std::to_string(params.out_channels) + "," +
                         std::to_string(params.in_channels) + "]");
  }
  require_input(input, params);
  const std::size_t in = params.in_channels;
  const std::size_t out = params.out_channels;
  Tensor result(Shape{s.n, out, 1, 1});
  for (std::size_t n = 0; n < s.n; ++n) {
    const double* x = input.sample(n).data();
    for (std::size_t j = 0; j < out; ++j) {
      const double* w = params.weights.data() + j * in;
      double acc = 0.0;
      for (std::size_t c = 0; c < in; ++c) acc += w[c] * x[c];
      result.at(n, j) = acc + params.bias[j];
    }
  }
  return result;
}

LayerGrads linear_backward(const Tensor& input, const LayerParams& params,
                           const Tensor& grad_out) {
  require_kind(params, LayerKind::kLinear);
  require_input(input, params);
  const Shape& s = input.shape();
  const std::size_t in = params.in_channels;
  const std::size_t out = params.out_channels;
  require_grad(grad_out, Shape{s.n, out, 1, 1});

  LayerGrads g{Tensor(s), std::vector<double>(in * out, 0.0), std::vector<double>(out, 0.0)};
  for (std::size_t n = 0; n < s.n; ++n) {
    const double* x = input.sample(n).data();
    double* gx = g.input.sample(n).data();
    for (std::size_t j = 0; j < out; ++j) {
      const double go = grad_out.at(n, j);
      const double* w = params.weights.data() + j * in;
      double* gw = g.weights.data() + j * in;
      g.bias[j] += go;
      for (std::size_t c = 0; c < in; ++c) {
        gw[c] += go * x[c];
        gx[c] += go * w[c];
      }
    }
  }
  return g;
}

Tensor conv_forward(const Tensor& input, const LayerParams& params) {
  require_kind(params, LayerKind::kConv3x3);
  require_input(input, params);
  const Shape& s = input.shape();
  const std::size_t in = params.in_channels;
  const std::size_t out = params.out_channels;
  const std::size_t H = s.h;
  const std::size_t W = s.w;
  Tensor result(Shape{s.n, out, H, W});

  // Each output element accumulates over (c, ky, kx) in the same order regardless
  // of batch composition, so a sample's activations do not depend on its batch.
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t o = 0; o < out; ++o) {
      auto dst = result.channel(n, o);
      std::fill(dst.begin(), dst.end(), 0.0);
      for (std::size_t c = 0; c < in; ++c) {
        const double* src = input.channel(n, c).data();
        const double* k = params.weights.data() + (o * in + c) * 9;
        for (std::size_t ky = 0; ky < 3; ++ky) {
          for (std::size_t kx = 0; kx < 3; ++kx) {
            const double wv = k[ky * 3 + kx];
            // output y reads input y + ky - 1
            const std::size_t y0 = ky == 0 ? 1 : 0;
            const std::size_t y1 = ky == 2 ? H - 1 : H;
            const std::size_t x0 = kx == 0 ? 1 : 0;
            const std::size_t x1 = kx == 2 ? W - 1 : W;
            for (std::size_t y = y0; y < y1; ++y) {
              const double* row = src + (y + ky - 1) * W;
              double* drow = dst.data() + y * W;
              for (std::size_t x = x0; x < x1; ++x) drow[x] += wv * row[x + kx - 1];
            }
          }
        }
      }
      for (double& v : dst) v += params.bias[o];
    }
  }
  return result;
}

LayerGrads conv_backward(const Tensor& input, const LayerParams& params, const Tensor& grad_out) {
  require_kind(params, LayerKind::kConv3x3);
  require_input(input, params);
  const Shape& s = input.shape();
  const std::size_t in = params.in_channels;
  const std::size_t out = params.out_channels;
  const std::size_t H = s.h;
  const std::size_t W = s.w;
  require_grad(grad_out, Shape{s.n, out, H, W});

  LayerGrads g{Tensor(s), std::vector<double>(in * out * 9, 0.0), std::vector<double>(out, 0.0)};
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t o = 0; o < out; ++o) {
      const double* go = grad_out.channel(n, o).data();
      double bsum = 0.0;
      for (std::size_t i = 0; i < H * W; ++i) bsum += go[i];
      g.bias[o] += bsum;
      for (std::size_t c = 0; c < in; ++c) {
        const double* src = input.channel(n, c).data();
        double* gsrc = g.input.channel(n, c).data();
        const double* k = params.weights.data() + (o * in + c) * 9;
        double* gk = g.weights.data() + (o * in + c) * 9;
        for (std::size_t ky = 0; ky < 3; ++ky) {
          for (std::size_t kx = 0; kx < 3; ++kx) {
            const double wv = k[ky * 3 + kx];
            const std::size_t y0 = ky == 0 ? 1 : 0;
            const std::size_t y1 = ky == 2 ? H - 1 : H;
            const std::size_t x0 = kx == 0 ? 1 : 0;
            const std::size_t x1 = kx == 2 ? W - 1 : W;
            double acc = 0.0;
            for (std::size_t y = y0; y < y1; ++y) {
              const double* row = src + (y + ky - 1) * W;
              double* grow = gsrc + (y + ky - 1) * W;
              const double* gorow = go + y * W;
              for (std::size_t x = x0; x < x1; ++x) {
                acc += gorow[x] * row[x + kx - 1];
                grow[x + kx - 1] += wv * gorow[x];
              }
            }
            gk[ky * 3 + kx] += acc;
          }
        }
      }
    }
  }
  return g;
}

Tensor relu_forward(const Tensor& input) {
  Tensor out = input;
  for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
  return out;
}

Tensor relu_backward(const Tensor& input, const Tensor& grad_out) {
  require_same_shape(input, grad_out, "relu_backward");
  Tensor g(input.shape());
  for (std::size_t i = 0; i < input.size(); ++i) g[i] = input[i] > 0.0 ? grad_out[i] : 0.0;
  return g;
}

Tensor global_avg_pool_forward(const Tensor& input) {
  const Shape& s = input.shape();
  Tensor out(Shape{s.n, s.c, 1, 1});
  const double inv = 1.0 / static_cast<double>(s.plane());
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < s.c; ++c) {
      double acc = 0.0;
      for (double v : input.channel(n, c)) acc += v;
      out.at(n, c) = acc * inv;
    }
  }
  return out;
}

Tensor global_avg_pool_backward(const Tensor& input, const Tensor& grad_out) {
  const Shape& s = input.shape();
  require_grad(grad_out, Shape{s.n, s.c, 1, 1});
  Tensor g(s);
  const double inv = 1.0 / static_cast<double>(s.plane());
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < s.c; ++c) {
      auto dst = g.channel(n, c);
      std::fill(dst.begin(), dst.end(), grad_out.at(n, c) * inv);
    }
  }
  return g;
}

Tensor layer_forward(const Tensor& input, const LayerParams& params) {
  switch (params.kind) {
    case LayerKind::kLinear: return linear_forward(input, params);
    case LayerKind::kConv3x3: return conv_forward(input, params);
    case LayerKind::kRelu: return relu_forward(input);
    case LayerKind::kGlobalAvgPool: return global_avg_pool_forward(input);
  }
  throw ParameterError("unknown layer kind");
}

LayerGrads layer_backward(const Tensor& input, const LayerParams& params, const Tensor& grad_out) {
  switch (params.kind) {
    case LayerKind::kLinear: return linear_backward(input, params, grad_out);
    case LayerKind::kConv3x3: return conv_backward(input, params, grad_out);
    case LayerKind::kRelu: return {relu_backward(input, grad_out), {}, {}};
    case LayerKind::kGlobalAvgPool: return {global_avg_pool_backward(input, grad_out), {}, {}};
  }
  throw ParameterError("unknown layer kind");
}

}  // namespace shufflemix

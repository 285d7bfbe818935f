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

#include "shufflemix/nets.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "shufflemix/errors.hpp"

namespace shufflemix {

namespace {

struct LayerRef {
  const LayerParams* layer;
  std::size_t offset;  // into the flattened parameter vector
};

/// Layers in execution order with their parameter offsets; block_start[b] indexes the
/// first layer of block b and block_start[L] the first head layer.
struct LayerIndex {
  std::vector<LayerRef> layers;
  std::vector<std::size_t> block_start;
};

LayerIndex index_layers(const Network& net) {
  LayerIndex idx;
  std::size_t offset = 0;
  auto push = [&](const LayerParams& p) {
    idx.layers.push_back({&p, offset});
    offset += p.parameter_count();
  };
  for (const auto& block : net.blocks) {
    idx.block_start.push_back(idx.layers.size());
    for (const auto& p : block) push(p);
  }
  idx.block_start.push_back(idx.layers.size());
  for (const auto& p : net.head) push(p);
  return idx;
}

void accumulate(std::vector<double>& grads, const LayerRef& ref, const LayerGrads& lg) {
  double* dst = grads.data() + ref.offset;
  for (std::size_t i = 0; i < lg.weights.size(); ++i) dst[i] += lg.weights[i];
  dst += ref.layer->weights.size();
  for (std::size_t i = 0; i < lg.bias.size(); ++i) dst[i] += lg.bias[i];
}

std::uint64_t row_seed(std::uint64_t seed, std::size_t row) {
  return seed ^ (0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(row) + 1));
}

Tensor single(const Tensor& t, std::size_t row) {
  const std::size_t idx[] = {row};
  return gather_rows(t, idx);
}

}  // namespace

Shape Network::hook_shape(int k, std::size_t n) const {
  if (k < 0 || k > top_hook()) throw ParameterError("hook " + std::to_string(k) + " out of range");
  Shape s = input.with_batch(n);
  for (int b = 0; b < k; ++b) {
    for (const auto& p : blocks[static_cast<std::size_t>(b)]) {
      if (p.kind == LayerKind::kLinear || p.kind == LayerKind::kConv3x3) s.c = p.out_channels;
      if (p.kind == LayerKind::kGlobalAvgPool || p.kind == LayerKind::kLinear) s.h = s.w = 1;
    }
  }
  return s;
}

std::size_t Network::parameter_count() const {
  std::size_t total = 0;
  for (const auto& block : blocks)
    for (const auto& p : block) total += p.parameter_count();
  for (const auto& p : head) total += p.parameter_count();
  return total;
}

std::vector<double> Network::flatten_parameters() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  auto push = [&](const LayerParams& p) {
    flat.insert(flat.end(), p.weights.begin(), p.weights.end());
    flat.insert(flat.end(), p.bias.begin(), p.bias.end());
  };
  for (const auto& block : blocks)
    for (const auto& p : block) push(p);
  for (const auto& p : head) push(p);
  return flat;
}

void Network::assign_parameters(std::span<const double> flat) {
  if (flat.size() != parameter_count()) {
    throw DimensionError("parameter vector of length " + std::to_string(flat.size()) +
                         " for a network with " + std::to_string(parameter_count()));
  }
  std::size_t pos = 0;
  auto take = [&](LayerParams& p) {
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), p.weights.size(), p.weights.begin());
    pos += p.weights.size();
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), p.bias.size(), p.bias.begin());
    pos += p.bias.size();
  };
  for (auto& block : blocks)
    for (auto& p : block) take(p);
  for (auto& p : head) take(p);
}

void Network::validate() const {
  if (head.empty()) throw ParameterError("network has no head");
  if (eligible.empty()) throw ParameterError("eligible hook set S is empty");
  for (std::size_t i = 0; i < eligible.size(); ++i) {
    if (eligible[i] < 0 || eligible[i] > top_hook()) {
      throw ParameterError("eligible hook " + std::to_string(eligible[i]) + " out of range");
    }
    if (i > 0 && eligible[i] <= eligible[i - 1]) {
      throw ParameterError("eligible hooks must be strictly increasing");
    }
  }
  std::size_t channels = input.c;
  auto check = [&](const LayerParams& p) {
    p.validate();
    if (p.kind == LayerKind::kLinear || p.kind == LayerKind::kConv3x3) {
      if (p.in_channels != channels) {
        throw DimensionError("layer expects " + std::to_string(p.in_channels) +
                             " channels, receives " + std::to_string(channels));
      }
      channels = p.out_channels;
    }
  };
  for (const auto& block : blocks)
    for (const auto& p : block) check(p);
  for (const auto& p : head) check(p);
  if (channels != num_classes) throw DimensionError("head does not produce num_classes logits");
  if (num_classes < 1) throw ParameterError("network needs at least one output");
}

void Network::set_eligible(std::vector<int> hooks) {
  std::sort(hooks.begin(), hooks.end());
  hooks.erase(std::unique(hooks.begin(), hooks.end()), hooks.end());
  eligible = std::move(hooks);
  validate();
}

Network build_mlp(std::size_t input_dim, std::span<const std::size_t> hidden_widths,
                  std::size_t num_classes) {
  if (hidden_widths.empty()) throw ParameterError("MLP needs at least one hidden width");
  if (input_dim == 0 || num_classes == 0) throw ParameterError("MLP dimensions must be positive");
  Network net;
  net.architecture = "mlp";
  net.input = Shape{1, input_dim, 1, 1};
  net.num_classes = num_classes;
  std::size_t in = input_dim;
  for (std::size_t w : hidden_widths) {
    if (w == 0) throw ParameterError("MLP widths must be >= 1");
    net.blocks.push_back({LayerParams::linear(in, w), LayerParams::relu()});
    in = w;
  }
  net.head.push_back(LayerParams::linear(in, num_classes));
  for (int k = 0; k <= net.top_hook(); ++k) net.eligible.push_back(k);
  net.validate();
  return net;
}

Network build_small_cnn(const Shape& input, std::span<const std::size_t> stage_widths,
                        std::size_t num_classes) {
  if (stage_widths.size() != 4) throw ParameterError("small CNN needs exactly 4 stage widths");
  if (input.c == 0 || input.h == 0 || input.w == 0 || num_classes == 0) {
    throw ParameterError("CNN dimensions must be positive");
  }
  Network net;
  net.architecture = "cnn";
  net.input = input.with_batch(1);
  net.num_classes = num_classes;
  std::size_t in = input.c;
  for (std::size_t w : stage_widths) {
    if (w == 0) throw ParameterError("CNN stage widths must be >= 1");
    net.blocks.push_back({LayerParams::conv3x3(in, w), LayerParams::relu()});
    in = w;
  }
  net.head.push_back(LayerParams::global_avg_pool());
  net.head.push_back(LayerParams::linear(in, num_classes));
  for (int k = 0; k <= net.top_hook(); ++k) net.eligible.push_back(k);
  net.validate();
  return net;
}

void initialize_parameters(Network& net, Rng& rng) {
  auto init = [&](LayerParams& p) {
    if (!p.has_parameters()) return;
    const std::size_t fan_in = p.kind == LayerKind::kConv3x3 ? p.in_channels * 9 : p.in_channels;
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (double& w : p.weights) w = rng.uniform(-bound, bound);
    for (double& b : p.bias) b = rng.uniform(-bound, bound);
  };
  for (auto& block : net.blocks)
    for (auto& p : block) init(p);
  for (auto& p : net.head) init(p);
}

Tensor forward(const Network& net, const Tensor& batch) {
  if (batch.shape().with_batch(1) != net.input) {
    throw DimensionError("batch " + to_string(batch.shape()) + " does not match network input " +
                         to_string(net.input));
  }
  Tensor x = batch;
  for (const auto& block : net.blocks)
    for (const auto& p : block) x = layer_forward(x, p);
  for (const auto& p : net.head) x = layer_forward(x, p);
  return x;
}

BatchOutput forward_with_injection(const Network& net, const Tensor& batch,
                                   std::span<const SoftLabel> labels,
                                   std::span<const AugmentPlan> plans, InjectionTrace* trace,
                                   const DropoutSpec& dropout) {
  const std::size_t n = batch.shape().n;
  if (batch.shape().with_batch(1) != net.input) {
    throw DimensionError("batch " + to_string(batch.shape()) + " does not match network input " +
                         to_string(net.input));
  }
  if (plans.size() != n || labels.size() != n) {
    throw DimensionError("batch of " + std::to_string(n) + " samples with " +
                         std::to_string(plans.size()) + " plans and " +
                         std::to_string(labels.size()) + " labels");
  }
  if (dropout.rate < 0.0 || dropout.rate >= 1.0) throw ParameterError("dropout rate must lie in [0,1)");

  const int top = net.top_hook();
  std::vector<int> hook_of(n);
  int deepest = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const AugmentPlan& p = plans[i];
    p.validate();
    if (p.partner >= n) {
      throw DimensionError("plan partner " + std::to_string(p.partner) + " outside batch of " +
                           std::to_string(n));
    }
    if (p.method != AugmentMethod::kNone && (p.k < 0 || p.k > top)) {
      throw ParameterError("plan hook " + std::to_string(p.k) + " outside 0.." + std::to_string(top));
    }
    hook_of[i] = p.method == AugmentMethod::kNone ? top : p.k;
    deepest = std::max(deepest, hook_of[i]);
  }

  const LayerIndex index = index_layers(net);

  InjectionTrace local;
  InjectionTrace& tr = trace ? *trace : local;
  tr = InjectionTrace{};
  tr.batch = n;
  tr.deepest = deepest;
  tr.plans.assign(plans.begin(), plans.end());
  tr.clean_hooks.push_back(batch);
  for (int b = 0; b < deepest; ++b) {
    const auto& block = net.blocks[static_cast<std::size_t>(b)];
    Tensor x = tr.clean_hooks.back();
    std::vector<Tensor> inputs;
    for (const auto& p : block) {
      inputs.push_back(x);
      x = layer_forward(x, p);
    }
    tr.clean_inputs.push_back(std::move(inputs));
    tr.clean_hooks.push_back(std::move(x));
  }

  std::map<int, std::vector<std::size_t>> by_hook;
  for (std::size_t i = 0; i < n; ++i) by_hook[hook_of[i]].push_back(i);

  BatchOutput out;
  out.logits = Tensor(Shape{n, net.num_classes, 1, 1});
  const std::size_t last_layer = index.layers.size() - 1;

  for (auto& [k, rows] : by_hook) {
    InjectionTrace::Group g;
    g.k = k;
    g.rows = rows;
    const Tensor& hook = tr.clean_hooks[static_cast<std::size_t>(k)];
    const Shape row_shape = hook.shape().with_batch(1);
    g.mixed = Tensor(hook.shape().with_batch(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const AugmentPlan& plan = plans[rows[r]];
      Tensor mixed = plan.method == AugmentMethod::kNone
                         ? single(hook, rows[r])
                         : apply_plan(single(hook, rows[r]), single(hook, plan.partner), plan);
      Tensor mult;
      double dm = 0.0;
      if (plan.nfm && (plan.nfm->delta_add != 0.0 || plan.nfm->delta_mult != 0.0)) {
        Rng noise_rng(plan.nfm->noise_seed);
        NfmNoise noise = draw_nfm_noise(row_shape, noise_rng);
        mixed = apply_nfm(mixed, plan.nfm->delta_add, plan.nfm->delta_mult, noise);
        mult = std::move(noise.mult);
        dm = plan.nfm->delta_mult;
      }
      std::copy(mixed.data().begin(), mixed.data().end(), g.mixed.sample(r).begin());
      g.weights.push_back(plan_channel_weights(plan, row_shape.c));
      g.nfm_mult.push_back(std::move(mult));
      g.nfm_delta_mult.push_back(dm);
    }

    Tensor x = g.mixed;
    for (std::size_t li = index.block_start[static_cast<std::size_t>(k)]; li <= last_layer; ++li) {
      if (li == last_layer && dropout.rate > 0.0) {
        const std::size_t feat = x.shape().sample_size();
        g.dropout_mask.assign(rows.size() * feat, 0.0);
        const double keep_scale = 1.0 / (1.0 - dropout.rate);
        for (std::size_t r = 0; r < rows.size(); ++r) {
          Rng drop_rng(row_seed(dropout.seed, rows[r]));
          auto xs = x.sample(r);
          for (std::size_t j = 0; j < feat; ++j) {
            const double m = drop_rng.uniform() < dropout.rate ? 0.0 : keep_scale;
            g.dropout_mask[r * feat + j] = m;
            xs[j] *= m;
          }
        }
      }
      g.tail_inputs.push_back(x);
      x = layer_forward(x, *index.layers[li].layer);
    }
    scatter_rows(out.logits, x, rows);
    tr.groups.push_back(std::move(g));
  }

  out.mixed_labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const AugmentPlan& p = plans[i];
    if (p.method == AugmentMethod::kNone) {
      out.mixed_labels.push_back(labels[i]);
    } else {
      out.mixed_labels.push_back(
          mix_labels(labels[i], labels[p.partner], p.label_ratio(), p.label_lambda()));
    }
  }
  out.plans.assign(plans.begin(), plans.end());
  return out;
}

std::vector<double> backward_with_injection(const Network& net, const InjectionTrace& trace,
                                            const Tensor& grad_logits) {
  if (grad_logits.shape() != Shape{trace.batch, net.num_classes, 1, 1}) {
    throw DimensionError("logit gradient " + to_string(grad_logits.shape()) +
                         " does not match the traced batch");
  }
  const LayerIndex index = index_layers(net);
  const std::size_t last_layer = index.layers.size() - 1;
  std::vector<double> grads(net.parameter_count(), 0.0);

  std::vector<Tensor> hook_grads;
  for (const auto& h : trace.clean_hooks) hook_grads.emplace_back(h.shape());

  for (const auto& g : trace.groups) {
    Tensor gx = gather_rows(grad_logits, g.rows);
    const std::size_t first = index.block_start[static_cast<std::size_t>(g.k)];
    for (std::size_t li = last_layer + 1; li-- > first;) {
      const LayerRef& ref = index.layers[li];
      LayerGrads lg = layer_backward(g.tail_inputs[li - first], *ref.layer, gx);
      accumulate(grads, ref, lg);
      gx = std::move(lg.input);
      if (li == last_layer && !g.dropout_mask.empty()) {
        for (std::size_t j = 0; j < gx.size(); ++j) gx[j] *= g.dropout_mask[j];
      }
    }
    Tensor& hg = hook_grads[static_cast<std::size_t>(g.k)];
    const Shape s = hg.shape();
    for (std::size_t r = 0; r < g.rows.size(); ++r) {
      auto grow = gx.sample(r);
      if (!g.nfm_mult[r].values().empty()) {
        const double dm = g.nfm_delta_mult[r];
        for (std::size_t j = 0; j < grow.size(); ++j) grow[j] *= 1.0 + dm * g.nfm_mult[r][j];
      }
      const std::size_t self = g.rows[r];
      const std::size_t partner = trace.plans[self].partner;
      const ChannelWeights& w = g.weights[r];
      for (std::size_t c = 0; c < s.c; ++c) {
        auto src = grow.subspan(c * s.plane(), s.plane());
        auto da = hg.channel(self, c);
        for (std::size_t j = 0; j < src.size(); ++j) da[j] += w.a[c] * src[j];
        if (w.b[c] != 0.0) {
          auto db = hg.channel(partner, c);
          for (std::size_t j = 0; j < src.size(); ++j) db[j] += w.b[c] * src[j];
        }
      }
    }
  }

  for (int h = trace.deepest; h >= 1; --h) {
    const auto b = static_cast<std::size_t>(h - 1);
    Tensor gx = hook_grads[static_cast<std::size_t>(h)];
    const auto& inputs = trace.clean_inputs[b];
    for (std::size_t l = inputs.size(); l-- > 0;) {
      const LayerRef& ref = index.layers[index.block_start[b] + l];
      LayerGrads lg = layer_backward(inputs[l], *ref.layer, gx);
      accumulate(grads, ref, lg);
      gx = std::move(lg.input);
    }
    Tensor& below = hook_grads[b];
    for (std::size_t j = 0; j < below.size(); ++j) below[j] += gx[j];
  }
  return grads;
}

std::vector<double> softmax_row(std::span<const double> logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    p[k] = std::exp(logits[k] - mx);
    sum += p[k];
  }
  for (double& v : p) v /= sum;
  return p;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

void check_loss_inputs(const Tensor& logits, std::span<const SoftLabel> targets) {
  const Shape& s = logits.shape();
  if (s.h != 1 || s.w != 1 || targets.size() != s.n) {
    throw DimensionError("logits " + to_string(s) + " with " + std::to_string(targets.size()) +
                         " targets");
  }
  for (const auto& t : targets) {
    if (t.size() != s.c) throw DimensionError("target length does not match logit count");
  }
  if (!logits.all_finite()) throw EvaluationError("non-finite logits");
}

}  // namespace

LossResult soft_cross_entropy(const Tensor& logits, std::span<const SoftLabel> targets) {
  check_loss_inputs(logits, targets);
  const Shape& s = logits.shape();
  const double inv_n = 1.0 / static_cast<double>(s.n);
  LossResult res{0.0, Tensor(s)};
  for (std::size_t n = 0; n < s.n; ++n) {
    if (targets[n].mode != LabelMode::kSimplex) {
      throw ParameterError("cross-entropy needs simplex targets");
    }
    auto z = logits.sample(n);
    const double mx = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - mx);
    const double lse = mx + std::log(sum);
    double row = 0.0;
    auto g = res.grad.sample(n);
    for (std::size_t k = 0; k < s.c; ++k) {
      const double t = targets[n].values[k];
      if (t != 0.0) row -= t * (z[k] - lse);
      g[k] = (std::exp(z[k] - lse) - t) * inv_n;
    }
    res.loss += row;
  }
  res.loss *= inv_n;
  return res;
}

LossResult bce_multilabel(const Tensor& logits, std::span<const SoftLabel> targets) {
  check_loss_inputs(logits, targets);
  const Shape& s = logits.shape();
  const double inv_n = 1.0 / static_cast<double>(s.n);
  LossResult res{0.0, Tensor(s)};
  for (std::size_t n = 0; n < s.n; ++n) {
    auto z = logits.sample(n);
    auto g = res.grad.sample(n);
    for (std::size_t k = 0; k < s.c; ++k) {
      const double y = targets[n].values[k];
      if (y != 0.0 && y != 1.0) throw ParameterError("BCE targets must be 0 or 1");
      // -y log s(z) - (1-y) log(1 - s(z)) = max(z,0) - z y + log(1 + exp(-|z|))
      res.loss += std::max(z[k], 0.0) - z[k] * y + std::log1p(std::exp(-std::abs(z[k])));
      g[k] = (sigmoid(z[k]) - y) * inv_n;
    }
  }
  res.loss *= inv_n;
  return res;
}

}  // namespace shufflemix

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

#include "shufflemix/augment.hpp"

#include <cmath>
#include <string>

#include "shufflemix/errors.hpp"

namespace shufflemix {

SoftLabel SoftLabel::one_hot(std::size_t cls, std::size_t num_classes) {
  if (cls >= num_classes) {
    throw ParameterError("class " + std::to_string(cls) + " out of range for " +
                         std::to_string(num_classes) + " classes");
  }
  SoftLabel y{std::vector<double>(num_classes, 0.0), LabelMode::kSimplex};
  y.values[cls] = 1.0;
  return y;
}

SoftLabel SoftLabel::multi_hot(const std::vector<std::size_t>& active, std::size_t num_classes) {
  SoftLabel y{std::vector<double>(num_classes, 0.0), LabelMode::kMultilabel};
  for (auto c : active) {
    if (c >= num_classes) throw ParameterError("active class out of range");
    y.values[c] = 1.0;
  }
  return y;
}

void SoftLabel::validate(double tol) const {
  double sum = 0.0;
  for (double v : values) {
    if (!(v >= 0.0)) throw ParameterError("soft label entry is negative or NaN");
    if (mode == LabelMode::kMultilabel && v > 1.0) {
      throw ParameterError("multilabel entry exceeds 1");
    }
    sum += v;
  }
  if (mode == LabelMode::kSimplex && std::abs(sum - 1.0) > tol) {
    throw ParameterError("simplex label sums to " + std::to_string(sum));
  }
}

std::string_view to_string(AugmentMethod m) {
  switch (m) {
    case AugmentMethod::kNone: return "none";
    case AugmentMethod::kInputMixup: return "input-mixup";
    case AugmentMethod::kManifoldMixup: return "manifold-mixup";
    case AugmentMethod::kHardShuffleMix: return "hard-shufflemix";
    case AugmentMethod::kSoftShuffleMix: return "soft-shufflemix";
  }
  return "unknown";
}

bool is_shufflemix(AugmentMethod m) {
  return m == AugmentMethod::kHardShuffleMix || m == AugmentMethod::kSoftShuffleMix;
}

void AugmentPlan::validate() const {
  if (is_shufflemix(method) != mask.has_value()) {
    throw ParameterError("plan mask must be present exactly for shufflemix methods");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ParameterError("plan lambda outside [0,1]: " + std::to_string(lambda));
  }
  if (method == AugmentMethod::kInputMixup && k != 0) {
    throw ParameterError("input mixup plans must use hook 0");
  }
  if (nfm && (nfm->delta_add < 0.0 || nfm->delta_mult < 0.0)) {
    throw ParameterError("NFM noise levels must be non-negative");
  }
}

double AugmentPlan::label_ratio() const {
  return mask ? mask->realized_ratio() : 1.0;
}

double AugmentPlan::label_lambda() const {
  switch (method) {
    case AugmentMethod::kNone: return 1.0;
    case AugmentMethod::kHardShuffleMix: return 0.0;
    default: return lambda;
  }
}

namespace {

void require_mask(const Tensor& h, const ChannelMask& mask) {
  if (mask.channels() != h.shape().c) {
    throw DimensionError("mask length " + std::to_string(mask.channels()) +
                         " does not match channel count of " + to_string(h.shape()));
  }
}

void require_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ParameterError("lambda outside [0,1]: " + std::to_string(lambda));
  }
}

}  // namespace

Tensor input_mixup(const Tensor& x_a, const Tensor& x_b, double lambda) {
  require_same_shape(x_a, x_b, "mixup");
  require_lambda(lambda);
  Tensor out(x_a.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = blend(x_a[i], x_b[i], lambda);
  return out;
}

Tensor manifold_mixup(const Tensor& h_a, const Tensor& h_b, double lambda) {
  // Same operator on hidden states; sharing the code path keeps the k = 0
  // reduction to input mixup exact.
  return input_mixup(h_a, h_b, lambda);
}

Tensor hard_shufflemix(const Tensor& h_a, const Tensor& h_b, const ChannelMask& mask) {
  require_same_shape(h_a, h_b, "hard_shufflemix");
  require_mask(h_a, mask);
  Tensor out = h_a;
  for (std::size_t n = 0; n < h_a.shape().n; ++n) {
    for (std::size_t c = 0; c < h_a.shape().c; ++c) {
      if (!mask.selected(c)) continue;
      auto src = h_b.channel(n, c);
      std::copy(src.begin(), src.end(), out.channel(n, c).begin());
    }
  }
  return out;
}

Tensor soft_shufflemix(const Tensor& h_a, const Tensor& h_b, const ChannelMask& mask,
                       double lambda) {
  require_same_shape(h_a, h_b, "soft_shufflemix");
  require_mask(h_a, mask);
  require_lambda(lambda);
  Tensor out = h_a;
  for (std::size_t n = 0; n < h_a.shape().n; ++n) {
    for (std::size_t c = 0; c < h_a.shape().c; ++c) {
      if (!mask.selected(c)) continue;
      auto a = h_a.channel(n, c);
      auto b = h_b.channel(n, c);
      auto dst = out.channel(n, c);
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = blend(a[i], b[i], lambda);
    }
  }
  return out;
}

Tensor apply_plan(const Tensor& h_a, const Tensor& h_b, const AugmentPlan& plan) {
  switch (plan.method) {
    case AugmentMethod::kNone:
      require_same_shape(h_a, h_b, "apply_plan");
      return h_a;
    case AugmentMethod::kInputMixup: return input_mixup(h_a, h_b, plan.lambda);
    case AugmentMethod::kManifoldMixup: return manifold_mixup(h_a, h_b, plan.lambda);
    case AugmentMethod::kHardShuffleMix: return hard_shufflemix(h_a, h_b, plan.mask.value());
    case AugmentMethod::kSoftShuffleMix:
      return soft_shufflemix(h_a, h_b, plan.mask.value(), plan.lambda);
  }
  throw ParameterError("unknown augmentation method");
}

ChannelWeights plan_channel_weights(const AugmentPlan& plan, std::size_t channels) {
  ChannelWeights w{std::vector<double>(channels, 1.0), std::vector<double>(channels, 0.0)};
  switch (plan.method) {
    case AugmentMethod::kNone: break;
    case AugmentMethod::kInputMixup:
    case AugmentMethod::kManifoldMixup:
      for (std::size_t c = 0; c < channels; ++c) {
        w.a[c] = plan.lambda;
        w.b[c] = 1.0 - plan.lambda;
      }
      break;
    case AugmentMethod::kHardShuffleMix:
    case AugmentMethod::kSoftShuffleMix: {
      const ChannelMask& m = plan.mask.value();
      if (m.channels() != channels) throw DimensionError("mask length does not match channels");
      const double lam = plan.method == AugmentMethod::kHardShuffleMix ? 0.0 : plan.lambda;
      for (std::size_t c = 0; c < channels; ++c) {
        if (!m.selected(c)) continue;
        w.a[c] = lam;
        w.b[c] = 1.0 - lam;
      }
      break;
    }
  }
  return w;
}

std::pair<double, double> label_coefficients(double ratio, double lambda) {
  const double cb = ratio * (1.0 - lambda);
  return {1.0 - cb, cb};
}

SoftLabel mix_labels(const SoftLabel& y_a, const SoftLabel& y_b, double ratio, double lambda) {
  if (y_a.size() != y_b.size() || y_a.mode != y_b.mode) {
    throw DimensionError("cannot mix labels of length/mode " + std::to_string(y_a.size()) +
                         " and " + std::to_string(y_b.size()));
  }
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw ParameterError("label ratio outside (0,1]: " + std::to_string(ratio));
  }
  require_lambda(lambda);
  const double ca = label_coefficients(ratio, lambda).first;
  SoftLabel out{std::vector<double>(y_a.size()), y_a.mode};
  for (std::size_t k = 0; k < y_a.size(); ++k) out.values[k] = blend(y_a.values[k], y_b.values[k], ca);
  return out;
}

NfmNoise draw_nfm_noise(const Shape& shape, Rng& rng, NfmNoiseAssignment assignment) {
  NfmNoise noise{Tensor(shape), Tensor(shape)};
  const bool mult_normal = assignment == NfmNoiseAssignment::kMultNormalAddUniform;
  for (double& v : noise.mult.data()) v = mult_normal ? rng.normal() : rng.uniform(-1.0, 1.0);
  for (double& v : noise.add.data()) v = mult_normal ? rng.uniform(-1.0, 1.0) : rng.normal();
  return noise;
}

Tensor apply_nfm(const Tensor& h_mixed, double delta_add, double delta_mult,
                 const NfmNoise& noise) {
  if (delta_add < 0.0 || delta_mult < 0.0) {
    throw ParameterError("NFM noise levels must be non-negative");
  }
  require_same_shape(h_mixed, noise.mult, "apply_nfm");
  require_same_shape(h_mixed, noise.add, "apply_nfm");
  if (delta_add == 0.0 && delta_mult == 0.0) return h_mixed;
  Tensor out(h_mixed.shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (1.0 + delta_mult * noise.mult[i]) * h_mixed[i] + delta_add * noise.add[i];
  }
  return out;
}

Tensor nfm_perturb(const Tensor& h_mixed, double delta_add, double delta_mult, Rng& rng,
                   NfmNoiseAssignment assignment) {
  if (delta_add < 0.0 || delta_mult < 0.0) {
    throw ParameterError("NFM noise levels must be non-negative");
  }
  if (delta_add == 0.0 && delta_mult == 0.0) return h_mixed;
  return apply_nfm(h_mixed, delta_add, delta_mult, draw_nfm_noise(h_mixed.shape(), rng, assignment));
}

SoftLabel threshold_labels(const SoftLabel& y_soft, double m_threshold) {
  if (y_soft.mode != LabelMode::kMultilabel) {
    throw ParameterError("label thresholding applies to multilabel targets only");
  }
  if (!(m_threshold > 0.0 && m_threshold < 1.0)) {
    throw ParameterError("threshold m must lie in (0,1), got " + std::to_string(m_threshold));
  }
  SoftLabel out{std::vector<double>(y_soft.size()), LabelMode::kMultilabel};
  for (std::size_t k = 0; k < y_soft.size(); ++k) {
    out.values[k] = y_soft.values[k] >= m_threshold ? 1.0 : 0.0;
  }
  return out;
}

SoftLabel positive_labels(const SoftLabel& y_soft) {
  if (y_soft.mode != LabelMode::kMultilabel) {
    throw ParameterError("label binarization applies to multilabel targets only");
  }
  SoftLabel out{std::vector<double>(y_soft.size()), LabelMode::kMultilabel};
  for (std::size_t k = 0; k < y_soft.size(); ++k) out.values[k] = y_soft.values[k] > 0.0 ? 1.0 : 0.0;
  return out;
}

}  // namespace shufflemix

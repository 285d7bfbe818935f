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

#ifndef SHUFFLEMIX_AUGMENT_HPP
#define SHUFFLEMIX_AUGMENT_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "shufflemix/sampling.hpp"
#include "shufflemix/tensor.hpp"

namespace shufflemix {

enum class LabelMode { kSimplex, kMultilabel };

/// Class-probability vector (simplex) or per-class membership scores (multilabel).
struct SoftLabel {
  std::vector<double> values;
  LabelMode mode = LabelMode::kSimplex;

  static SoftLabel one_hot(std::size_t cls, std::size_t num_classes);
  static SoftLabel multi_hot(const std::vector<std::size_t>& active, std::size_t num_classes);

  std::size_t size() const { return values.size(); }
  /// Throws ParameterError if the mode invariant does not hold (simplex sum within tol).
  void validate(double tol = 1e-12) const;

  friend bool operator==(const SoftLabel&, const SoftLabel&) = default;
};

enum class AugmentMethod { kNone, kInputMixup, kManifoldMixup, kHardShuffleMix, kSoftShuffleMix };

std::string_view to_string(AugmentMethod m);
bool is_shufflemix(AugmentMethod m);

/// Noise levels for post-mix feature noise plus the seed that fixes its draw.
struct NfmSpec {
  double delta_add = 0.0;
  double delta_mult = 0.0;
  std::uint64_t noise_seed = 0;

  friend bool operator==(const NfmSpec&, const NfmSpec&) = default;
};

/// One sample's augmentation draw.
struct AugmentPlan {
  AugmentMethod method = AugmentMethod::kNone;
  int k = 0;
  double lambda = 1.0;
  std::optional<ChannelMask> mask;
  std::size_t partner = 0;
  std::optional<NfmSpec> nfm;

  /// Throws ParameterError on broken invariants (mask iff shufflemix, lambda in [0,1]).
  void validate() const;
  /// r used by the label interpolation: ||m|| / C' for shufflemix, 1 otherwise.
  double label_ratio() const;
  /// lambda entering the label interpolation (hard shufflemix uses 0).
  double label_lambda() const;

  static AugmentPlan none(std::size_t self) { return {AugmentMethod::kNone, 0, 1.0, {}, self, {}}; }
};

/// lambda * a + (1 - lambda) * b. Returns `a` bit-exactly when a == b, and is clamped
/// into [min(a,b), max(a,b)] so rounding can never leave the segment.
inline double blend(double a, double b, double lambda) {
  if (a == b) return a;
  const double v = lambda * a + (1.0 - lambda) * b;
  const double lo = a < b ? a : b;
  const double hi = a < b ? b : a;
  return v < lo ? lo : (v > hi ? hi : v);
}

Tensor input_mixup(const Tensor& x_a, const Tensor& x_b, double lambda);
Tensor manifold_mixup(const Tensor& h_a, const Tensor& h_b, double lambda);
/// Selected channels come from h_b, the rest from h_a.
Tensor hard_shufflemix(const Tensor& h_a, const Tensor& h_b, const ChannelMask& mask);
/// Selected channels are interpolated, the rest copied from h_a.
Tensor soft_shufflemix(const Tensor& h_a, const Tensor& h_b, const ChannelMask& mask,
                       double lambda);

/// Applies the plan's feature operator (no noise) to a pair of equally shaped tensors.
Tensor apply_plan(const Tensor& h_a, const Tensor& h_b, const AugmentPlan& plan);

/// Per-channel derivative of the mixed output w.r.t. h_a and h_b for the plan.
struct ChannelWeights {
  std::vector<double> a;
  std::vector<double> b;
};
ChannelWeights plan_channel_weights(const AugmentPlan& plan, std::size_t channels);

/// Coefficients (c_a, c_b) of y_a and y_b in the interpolated label:
/// c_b = r (1 - lambda), c_a = 1 - c_b.
std::pair<double, double> label_coefficients(double ratio, double lambda);

SoftLabel mix_labels(const SoftLabel& y_a, const SoftLabel& y_b, double ratio, double lambda);

/// Which noise law feeds which term of the post-mix noise.
enum class NfmNoiseAssignment {
  kMultNormalAddUniform,  // default: xi_mult ~ N(0,1), xi_add ~ U[-1,1]
  kMultUniformAddNormal,
};

struct NfmNoise {
  Tensor mult;
  Tensor add;
};

/// Draws every multiplicative variate (row-major) followed by every additive one.
NfmNoise draw_nfm_noise(const Shape& shape, Rng& rng,
                        NfmNoiseAssignment assignment = NfmNoiseAssignment::kMultNormalAddUniform);

/// (1 + delta_mult * xi_mult) * h + delta_add * xi_add for pre-drawn noise. Both deltas
/// zero returns h unchanged.
Tensor apply_nfm(const Tensor& h_mixed, double delta_add, double delta_mult, const NfmNoise& noise);

Tensor nfm_perturb(const Tensor& h_mixed, double delta_add, double delta_mult, Rng& rng,
                   NfmNoiseAssignment assignment = NfmNoiseAssignment::kMultNormalAddUniform);

/// Binarizes a multilabel soft label: 1 where y >= m, else 0. m must lie in (0,1).
SoftLabel threshold_labels(const SoftLabel& y_soft, double m_threshold);

/// Binarizes with y > 0 (the threshold-free variant used when no m is configured).
SoftLabel positive_labels(const SoftLabel& y_soft);

}  // namespace shufflemix

#endif  // SHUFFLEMIX_AUGMENT_HPP

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

#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "shufflemix/augment.hpp"
#include "shufflemix/errors.hpp"
#include "shufflemix/sampling.hpp"

namespace shufflemix {
namespace {

Tensor random_tensor(Shape s, Rng& rng) {
  Tensor t(s);
  for (auto& v : t.data()) v = rng.uniform(-3.0, 3.0);
  return t;
}

Tensor vec(std::vector<double> v) {
  const std::size_t c = v.size();
  return Tensor(Shape{1, c, 1, 1}, std::move(v));
}

SoftLabel random_simplex(std::size_t k, Rng& rng) {
  SoftLabel y;
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    y.values.push_back(-std::log(rng.uniform_open()));
    sum += y.values.back();
  }
  for (auto& v : y.values) v /= sum;
  // Push the rounding residue into the largest entry so the sum is 1 to ~1 ulp.
  double rest = 1.0;
  const auto big = static_cast<std::size_t>(std::max_element(y.values.begin(), y.values.end()) - y.values.begin());
  for (std::size_t i = 0; i < k; ++i)
    if (i != big) rest -= y.values[i];
  y.values[big] = rest;
  return y;
}

TEST(Mixup, Examples) {
  Rng rng(1);
  const Tensor a = random_tensor({2, 3, 2, 2}, rng), b = random_tensor({2, 3, 2, 2}, rng);
  EXPECT_EQ(input_mixup(a, b, 1.0), a);
  EXPECT_EQ(input_mixup(a, b, 0.0), b);
  EXPECT_EQ(input_mixup(vec({2}), vec({4}), 0.25).values(), std::vector<double>{3.5});
  EXPECT_EQ(manifold_mixup(a, a, 0.37), a);
  EXPECT_EQ(manifold_mixup(vec({1, 3}), vec({3, 1}), 0.5).values(), (std::vector<double>{2, 2}));
  EXPECT_THROW(input_mixup(a, random_tensor({2, 3, 2, 1}, rng), 0.5), DimensionError);
  EXPECT_THROW(input_mixup(a, b, 1.5), ParameterError);
}

TEST(ShuffleMix, Examples) {
  const Tensor ones = vec({1, 1, 1, 1}), nines = vec({9, 9, 9, 9});
  EXPECT_EQ(hard_shufflemix(ones, nines, ChannelMask::from_bits({0, 1, 0, 1})).values(),
            (std::vector<double>{1, 9, 1, 9}));
  EXPECT_EQ(hard_shufflemix(ones, nines, ChannelMask::all_zeros(4)), ones);
  EXPECT_EQ(hard_shufflemix(ones, nines, ChannelMask::all_ones(4)), nines);
  EXPECT_EQ(soft_shufflemix(vec({2, 2}), vec({0, 4}), ChannelMask::from_bits({0, 1}), 0.5).values(),
            (std::vector<double>{2, 3}));
  EXPECT_THROW(hard_shufflemix(ones, nines, ChannelMask::all_ones(3)), DimensionError);
}

TEST(ShuffleMix, ReductionIdentitiesBitExact) {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const Shape s{1 + rng.below(3), 1 + rng.below(9), 1 + rng.below(3), 1 + rng.below(3)};
    const Tensor a = random_tensor(s, rng), b = random_tensor(s, rng);
    const double lambda = rng.uniform();
    const ChannelMask m = sample_channel_mask(s.c, rng.uniform_open(), rng);
    EXPECT_EQ(soft_shufflemix(a, b, ChannelMask::all_ones(s.c), lambda), manifold_mixup(a, b, lambda));
    EXPECT_EQ(soft_shufflemix(a, b, m, 0.0), hard_shufflemix(a, b, m));
    EXPECT_EQ(manifold_mixup(a, b, lambda), input_mixup(a, b, lambda));
  }
}

TEST(ShuffleMix, ChannelPreservationConvexityIdempotence) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const Shape s{2, 1 + rng.below(8), 2, 2};
    const Tensor a = random_tensor(s, rng), b = random_tensor(s, rng);
    const double lambda = rng.uniform();
    const ChannelMask m = sample_channel_mask(s.c, rng.uniform_open(), rng);
    const Tensor soft = soft_shufflemix(a, b, m, lambda);
    const Tensor hard = hard_shufflemix(a, b, m);
    const Tensor mix = manifold_mixup(a, b, lambda);
    for (std::size_t n = 0; n < s.n; ++n)
      for (std::size_t c = 0; c < s.c; ++c)
        for (std::size_t i = 0; i < s.plane(); ++i) {
          const std::size_t idx = a.index(n, c) + i;
          const double lo = std::min(a[idx], b[idx]), hi = std::max(a[idx], b[idx]);
          if (!m.selected(c)) {
            EXPECT_EQ(soft[idx], a[idx]);
            EXPECT_EQ(hard[idx], a[idx]);
          }
          for (double v : {soft[idx], hard[idx], mix[idx]}) {
            EXPECT_GE(v, lo);
            EXPECT_LE(v, hi);
          }
        }
    EXPECT_EQ(soft_shufflemix(a, a, m, lambda), a);
    EXPECT_EQ(hard_shufflemix(a, a, m), a);
    EXPECT_EQ(manifold_mixup(a, a, lambda), a);
  }
}

TEST(ShuffleMix, ChannelWeightsMatchFormula) {
  AugmentPlan plan{AugmentMethod::kSoftShuffleMix, 1, 0.3, ChannelMask::from_bits({1, 0, 1}), 0, {}};
  const ChannelWeights w = plan_channel_weights(plan, 3);
  EXPECT_EQ(w.a, (std::vector<double>{0.3, 1.0, 0.3}));
  EXPECT_EQ(w.b, (std::vector<double>{0.7, 0.0, 0.7}));
  plan.method = AugmentMethod::kHardShuffleMix;
  plan.lambda = 0.0;
  const ChannelWeights h = plan_channel_weights(plan, 3);
  EXPECT_EQ(h.a, (std::vector<double>{0.0, 1.0, 0.0}));
  EXPECT_EQ(h.b, (std::vector<double>{1.0, 0.0, 1.0}));
}

TEST(Labels, Examples) {
  const SoftLabel a = SoftLabel::one_hot(0, 2), b = SoftLabel::one_hot(1, 2);
  EXPECT_EQ(mix_labels(a, b, 0.5, 0.5).values, (std::vector<double>{0.75, 0.25}));
  const SoftLabel vanilla = mix_labels(a, b, 1.0, 0.3);
  EXPECT_DOUBLE_EQ(vanilla.values[0], 0.3);
  EXPECT_DOUBLE_EQ(vanilla.values[1], 0.7);
  EXPECT_EQ(mix_labels(a, b, 0.4, 1.0), a);
  EXPECT_EQ(mix_labels(a, a, 0.4, 0.2), a);
  EXPECT_THROW(mix_labels(a, SoftLabel::one_hot(1, 3), 0.5, 0.5), DimensionError);
  EXPECT_THROW(SoftLabel::one_hot(2, 2), ParameterError);
}

TEST(Labels, SimplexClosureAndCoefficients) {
  Rng rng(4);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t k = 2 + rng.below(9);
    const SoftLabel ya = random_simplex(k, rng), yb = random_simplex(k, rng);
    const double r = rng.uniform_open(), lambda = rng.uniform();
    const auto [ca, cb] = label_coefficients(r, lambda);
    EXPECT_EQ(ca + cb, 1.0);
    EXPECT_NEAR(cb, r * (1.0 - lambda), 1e-15);
    const SoftLabel y = mix_labels(ya, yb, r, lambda);
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      ASSERT_GE(y.values[i], 0.0);
      sum += y.values[i];
      // Oracle: the expanded two-stage form.
      EXPECT_NEAR(y.values[i], (1.0 - r) * ya.values[i] + r * (lambda * ya.values[i] + (1.0 - lambda) * yb.values[i]),
                  1e-14);
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(Plan, ValidationAndLabelTerms) {
  AugmentPlan p{AugmentMethod::kSoftShuffleMix, 2, 0.6, ChannelMask::from_bits({1, 0, 0, 0}), 3, {}};
  EXPECT_NO_THROW(p.validate());
  EXPECT_DOUBLE_EQ(p.label_ratio(), 0.25);
  EXPECT_DOUBLE_EQ(p.label_lambda(), 0.6);
  p.method = AugmentMethod::kHardShuffleMix;
  EXPECT_EQ(p.label_lambda(), 0.0);
  p.method = AugmentMethod::kManifoldMixup;
  EXPECT_THROW(p.validate(), ParameterError);  // mask on a non-shufflemix plan
  p.mask.reset();
  EXPECT_EQ(p.label_ratio(), 1.0);
  p.lambda = 1.2;
  EXPECT_THROW(p.validate(), ParameterError);
  AugmentPlan q{AugmentMethod::kInputMixup, 1, 0.5, {}, 0, {}};
  EXPECT_THROW(q.validate(), ParameterError);
}

TEST(Nfm, ZeroNoiseIsIdentity) {
  Rng rng(5);
  const Tensor h = random_tensor({3, 4, 2, 2}, rng);
  EXPECT_EQ(nfm_perturb(h, 0.0, 0.0, rng), h);
  EXPECT_THROW(nfm_perturb(h, -0.1, 0.0, rng), ParameterError);
}

TEST(Nfm, ZeroInputGivesAdditiveLaw) {
  Rng rng(6);
  const Tensor zero(Shape{1, 100000, 1, 1});
  const Tensor out = nfm_perturb(zero, 1.0, 3.0, rng);
  double mean = 0.0, lo = 1.0, hi = -1.0;
  for (double v : out.values()) {
    mean += v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  mean /= 1e5;
  EXPECT_LE(std::abs(mean), 0.02);
  EXPECT_GE(lo, -1.0);
  EXPECT_LE(hi, 1.0);
  EXPECT_LT(lo, -0.99);
  EXPECT_GT(hi, 0.99);
}

TEST(Nfm, ExpectationPreservesInput) {
  Rng rng(7);
  const Tensor h(Shape{1, 1000, 1, 1}, 1.7);
  double mean = 0.0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    const Tensor out = nfm_perturb(h, 0.2, 0.4, rng);
    ASSERT_TRUE(out.all_finite());
    for (double v : out.values()) mean += v;
  }
  mean /= 1000.0 * reps;
  EXPECT_NEAR(mean, 1.7, 0.01);
}

TEST(Nfm, AssignmentSwitch) {
  Rng rng(8);
  const Shape s{1, 20000, 1, 1};
  const NfmNoise def = draw_nfm_noise(s, rng);
  const NfmNoise alt = draw_nfm_noise(s, rng, NfmNoiseAssignment::kMultUniformAddNormal);
  auto max_abs = [](const Tensor& t) {
    double m = 0.0;
    for (double v : t.values()) m = std::max(m, std::abs(v));
    return m;
  };
  EXPECT_LE(max_abs(def.add), 1.0);
  EXPECT_GT(max_abs(def.mult), 2.5);  // normal tails
  EXPECT_LE(max_abs(alt.mult), 1.0);
  EXPECT_GT(max_abs(alt.add), 2.5);
  // Direct evaluation of the noise formula on pre-drawn noise.
  const Tensor h = random_tensor(s, rng);
  const Tensor out = apply_nfm(h, 0.2, 0.4, def);
  for (std::size_t i = 0; i < h.size(); i += 997) {
    EXPECT_NEAR(out[i], (1.0 + 0.4 * def.mult[i]) * h[i] + 0.2 * def.add[i], 1e-12);
  }
}

TEST(Threshold, Examples) {
  SoftLabel y{{0.75, 0.25, 0.0}, LabelMode::kMultilabel};
  EXPECT_EQ(threshold_labels(y, 0.3).values, (std::vector<double>{1, 0, 0}));
  EXPECT_EQ(threshold_labels(y, 0.2499).values, (std::vector<double>{1, 1, 0}));
  SoftLabel z{{0.0, 0.0}, LabelMode::kMultilabel};
  for (double m : {0.01, 0.5, 0.99}) EXPECT_EQ(threshold_labels(z, m).values, (std::vector<double>{0, 0}));
  EXPECT_THROW(threshold_labels(y, 0.0), ParameterError);
  EXPECT_THROW(threshold_labels(y, 1.0), ParameterError);
  EXPECT_THROW(threshold_labels(SoftLabel::one_hot(0, 2), 0.5), ParameterError);
  EXPECT_EQ(positive_labels(y).values, (std::vector<double>{1, 1, 0}));
}

TEST(Threshold, Monotone) {
  Rng rng(9);
  for (int trial = 0; trial < 2000; ++trial) {
    SoftLabel y;
    y.mode = LabelMode::kMultilabel;
    for (int k = 0; k < 6; ++k) y.values.push_back(rng.uniform());
    const double m1 = rng.uniform_open(), m2 = m1 + (1.0 - m1) * rng.uniform();
    if (!(m2 < 1.0)) continue;
    const SoftLabel lo = threshold_labels(y, m1), hi = threshold_labels(y, m2);
    for (std::size_t k = 0; k < 6; ++k) EXPECT_LE(hi.values[k], lo.values[k]);
  }
}

TEST(Labels, MultilabelMixStaysInUnitBox) {
  Rng rng(10);
  const SoftLabel a = SoftLabel::multi_hot({0, 2}, 4), b = SoftLabel::multi_hot({1, 2}, 4);
  for (int t = 0; t < 1000; ++t) {
    const SoftLabel y = mix_labels(a, b, rng.uniform_open(), rng.uniform());
    EXPECT_NO_THROW(y.validate());
    EXPECT_EQ(y.values[2], 1.0);
  }
}

}  // namespace
}  // namespace shufflemix

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
#include <map>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "shufflemix/errors.hpp"
#include "shufflemix/sampling.hpp"

namespace shufflemix {
namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  for (double x : v) m.var += (x - m.mean) * (x - m.mean);
  m.var /= static_cast<double>(v.size() - 1);
  return m;
}

// Kolmogorov-Smirnov distance from the U(0,1) CDF.
double ks_uniform(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - v[i]);
    d = std::max(d, v[i] - static_cast<double>(i) / n);
  }
  return d;
}

std::vector<double> beta_draws(double alpha, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = sample_beta(alpha, rng);
  return v;
}

TEST(Rng, SeedDeterminism) {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    if (i == 0) EXPECT_NE(x, c.next_u64());
  }
}

TEST(Rng, KnownFirstOutputs) {
  // xoshiro256** over a splitmix64-expanded zero seed, from a reference implementation.
  Rng a(0);
  EXPECT_EQ(a.next_u64(), 0x99ec5f36cb75f2b4ULL);
  EXPECT_EQ(a.next_u64(), 0xbf6e1f784956452aULL);
  EXPECT_EQ(a.next_u64(), 0x1a5f849d4933e6e0ULL);
}

TEST(Rng, UniformAndBelow) {
  Rng rng(7);
  std::vector<std::size_t> counts(6, 0);
  for (int i = 0; i < 60000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_GT(rng.uniform_open(), 0.0);
    ++counts[rng.below(6)];
  }
  for (auto c : counts) EXPECT_NEAR(static_cast<double>(c) / 60000.0, 1.0 / 6.0, 0.01);
}

TEST(Rng, NormalMoments) {
  Rng rng(12);
  std::vector<double> v(100000);
  for (auto& x : v) x = rng.normal();
  const Moments m = moments(v);
  EXPECT_NEAR(m.mean, 0.0, 0.01);
  EXPECT_NEAR(m.var, 1.0, 0.02);
}

TEST(Beta, UniformCaseMomentsAndKs) {
  const auto v = beta_draws(1.0, 100000, 1);
  const Moments m = moments(v);
  EXPECT_NEAR(m.mean, 0.5, 0.01);
  EXPECT_NEAR(m.var, 1.0 / 12.0, 0.005);
  EXPECT_LT(ks_uniform(v), 0.01);
}

TEST(Beta, VarianceFormula) {
  for (double a : {0.2, 0.5, 2.0, 8.0}) {
    const auto v = beta_draws(a, 100000, 2);
    const double expected = 1.0 / (4.0 * (2.0 * a + 1.0));
    const Moments m = moments(v);
    EXPECT_NEAR(m.var, expected, 0.03 * expected) << "alpha " << a;
    EXPECT_NEAR(m.mean, 0.5, 0.01) << "alpha " << a;
  }
}

TEST(Beta, SupportAndErrors) {
  Rng rng(3);
  for (double a : {0.05, 0.4, 1.0, 3.0, 50.0})
    for (int i = 0; i < 5000; ++i) {
      const double l = sample_beta(a, rng);
      ASSERT_GE(l, 0.0);
      ASSERT_LE(l, 1.0);
    }
  EXPECT_THROW(sample_beta(0.0, rng), ParameterError);
  EXPECT_THROW(sample_beta(-1.0, rng), ParameterError);
  EXPECT_THROW(sample_gamma(0.0, rng), ParameterError);
}

TEST(Gamma, MeanEqualsShape) {
  Rng rng(5);
  for (double k : {0.3, 1.0, 4.5}) {
    std::vector<double> v(50000);
    for (auto& x : v) x = sample_gamma(k, rng);
    const Moments m = moments(v);
    EXPECT_NEAR(m.mean, k, 0.03 * std::max(1.0, k));
    EXPECT_NEAR(m.var, k, 0.08 * std::max(1.0, k));
  }
}

TEST(Mask, Examples) {
  Rng rng(1);
  EXPECT_EQ(sample_channel_mask(8, 0.5, rng).cardinality, 4u);
  const ChannelMask full = sample_channel_mask(4, 1.0, rng);
  EXPECT_EQ(full, ChannelMask::all_ones(4));
  EXPECT_EQ(mask_cardinality(10, 0.01), 1u);  // promoted from 0
  EXPECT_EQ(mask_cardinality(5, 0.5), 3u);    // 2.5 rounds away from zero
  EXPECT_THROW(sample_channel_mask(4, 0.0, rng), ParameterError);
  EXPECT_THROW(sample_channel_mask(4, 1.5, rng), ParameterError);
  EXPECT_THROW(sample_channel_mask(0, 0.5, rng), ParameterError);
  EXPECT_THROW(ChannelMask::from_bits({0, 2}), ParameterError);
}

TEST(Mask, CardinalitySweep) {
  Rng rng(2024);
  for (std::size_t c = 1; c <= 1024; ++c) {
    for (int j = 1; j <= 8; ++j) {
      const double r = 0.125 * j;
      const auto expected = static_cast<std::size_t>(std::max(1.0, std::floor(r * static_cast<double>(c) + 0.5)));
      ASSERT_EQ(mask_cardinality(c, r), expected) << c << " " << r;
      for (int d = 0; d < 1000; ++d) {
        const ChannelMask m = sample_channel_mask(c, r, rng);
        const auto ones = static_cast<std::size_t>(std::count(m.bits.begin(), m.bits.end(), 1));
        ASSERT_EQ(m.cardinality, expected);
        ASSERT_EQ(ones, expected);
      }
    }
  }
}

TEST(Mask, ChannelFrequencyUniform) {
  Rng rng(77);
  std::vector<int> hits(8, 0);
  for (int d = 0; d < 10000; ++d) {
    const ChannelMask m = sample_channel_mask(8, 0.5, rng);
    for (std::size_t c = 0; c < 8; ++c) hits[c] += m.bits[c];
  }
  for (int h : hits) EXPECT_NEAR(h / 10000.0, 0.5, 0.02);
}

TEST(LayerIndex, Examples) {
  Rng rng(9);
  const std::vector<int> zero{0}, three{3}, all{0, 1, 2, 3, 4};
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(sample_layer_index(zero, rng), 0);
    EXPECT_EQ(sample_layer_index(three, rng), 3);
  }
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 100000; ++i) ++counts[static_cast<std::size_t>(sample_layer_index(all, rng))];
  for (int c : counts) EXPECT_NEAR(c / 100000.0, 0.2, 0.01);
  EXPECT_THROW(sample_layer_index(std::vector<int>{}, rng), ParameterError);
}

TEST(Permutation, Examples) {
  Rng rng(4);
  EXPECT_EQ(pairing_permutation(1, rng), std::vector<std::size_t>{0});
  for (std::size_t n : {2u, 7u, 128u}) {
    auto p = pairing_permutation(n, rng);
    std::sort(p.begin(), p.end());
    std::vector<std::size_t> id(n);
    std::iota(id.begin(), id.end(), 0u);
    EXPECT_EQ(p, id);
  }
}

TEST(Permutation, AllTwentyFourUniform) {
  Rng rng(31);
  std::map<std::vector<std::size_t>, int> counts;
  for (int i = 0; i < 10000; ++i) ++counts[pairing_permutation(4, rng)];
  EXPECT_EQ(counts.size(), 24u);
  for (const auto& [perm, c] : counts) EXPECT_NEAR(c / 10000.0, 1.0 / 24.0, 0.01);
}

TEST(Sampling, SeededSequencesMatch) {
  const std::vector<int> s{0, 1, 2, 3};
  Rng a(555), b(555);
  for (int i = 0; i < 200; ++i) {
    EXPECT_EQ(sample_beta(1.0, a), sample_beta(1.0, b));
    EXPECT_EQ(sample_channel_mask(16, 0.5, a), sample_channel_mask(16, 0.5, b));
    EXPECT_EQ(sample_layer_index(s, a), sample_layer_index(s, b));
    EXPECT_EQ(pairing_permutation(9, a), pairing_permutation(9, b));
  }
  EXPECT_EQ(a, b);
}

TEST(Rng, SplitStreamsDiffer) {
  Rng master(1);
  Rng x(master.split()), y(master.split());
  EXPECT_NE(x.next_u64(), y.next_u64());
}

}  // namespace
}  // namespace shufflemix

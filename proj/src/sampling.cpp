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

#include "shufflemix/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "shufflemix/errors.hpp"

namespace shufflemix {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

// Unbiased bounded 32-bit draws (Lemire), two per 64-bit output of the generator.
class Below32 {
 public:
  explicit Below32(Rng& rng) : rng_(rng) {}
  std::uint32_t operator()(std::uint32_t bound) {
    std::uint64_t m = static_cast<std::uint64_t>(next()) * bound;
    auto low = static_cast<std::uint32_t>(m);
    if (low < bound) {
      const std::uint32_t threshold = (0u - bound) % bound;
      while (low < threshold) {
        m = static_cast<std::uint64_t>(next()) * bound;
        low = static_cast<std::uint32_t>(m);
      }
    }
    return static_cast<std::uint32_t>(m >> 32);
  }

 private:
  std::uint32_t next() {
    if (has_low_) {
      has_low_ = false;
      return low_;
    }
    const std::uint64_t x = rng_.next_u64();
    low_ = static_cast<std::uint32_t>(x);
    has_low_ = true;
    return static_cast<std::uint32_t>(x >> 32);
  }
  Rng& rng_;
  std::uint32_t low_ = 0;
  bool has_low_ = false;
};

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t x = seed;
  for (auto& word : s_) word = splitmix64(x);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform_open() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw ParameterError("Rng::below requires a positive bound");
  __uint128_t m = static_cast<__uint128_t>(next_u64()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<__uint128_t>(next_u64()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * f;
  has_spare_ = true;
  return u * f;
}

std::uint64_t Rng::split() {
  std::uint64_t x = next_u64();
  return splitmix64(x);
}

double sample_gamma(double shape, Rng& rng) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw ParameterError("gamma shape must be positive, got " + std::to_string(shape));
  }
  if (shape < 1.0) {
    const double boosted = sample_gamma(shape + 1.0, rng);
    return boosted * std::pow(rng.uniform_open(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_open();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double sample_beta(double alpha, Rng& rng) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ParameterError("Beta alpha must be positive, got " + std::to_string(alpha));
  }
  const double x = sample_gamma(alpha, rng);
  const double y = sample_gamma(alpha, rng);
  const double sum = x + y;
  // Both gammas can underflow to zero for very small alpha; the limit law puts
  // all mass on the endpoints.
  if (sum == 0.0) return rng.bernoulli(0.5) ? 1.0 : 0.0;
  return x / sum;
}

ChannelMask ChannelMask::all_ones(std::size_t channels) {
  return {std::vector<std::uint8_t>(channels, 1), channels};
}

ChannelMask ChannelMask::all_zeros(std::size_t channels) {
  return {std::vector<std::uint8_t>(channels, 0), 0};
}

ChannelMask ChannelMask::from_bits(std::vector<std::uint8_t> bits) {
  std::size_t ones = 0;
  for (auto b : bits) {
    if (b > 1) throw ParameterError("channel mask entries must be 0 or 1");
    ones += b;
  }
  return {std::move(bits), ones};
}

std::size_t mask_cardinality(std::size_t channels, double ratio) {
  if (channels == 0) throw ParameterError("channel count must be at least 1");
  if (!(ratio > 0.0) || ratio > 1.0) {
    throw ParameterError("mask ratio must lie in (0, 1], got " + std::to_string(ratio));
  }
  const auto k = static_cast<std::size_t>(std::round(ratio * static_cast<double>(channels)));
  return std::clamp<std::size_t>(k, 1, channels);
}

ChannelMask sample_channel_mask(std::size_t channels, double ratio, Rng& rng) {
  const std::size_t k = mask_cardinality(channels, ratio);
  // Partial Fisher-Yates: the first j slots form a uniform j-subset. For k > C/2 the
  // complement is drawn instead, which is uniform as well and needs fewer draws.
  const bool complement = 2 * k > channels;
  const std::size_t draws = complement ? channels - k : k;
  ChannelMask mask = complement ? ChannelMask::all_ones(channels) : ChannelMask::all_zeros(channels);
  const std::uint8_t mark = complement ? 0 : 1;
  if (channels > UINT32_MAX) throw ParameterError("channel count exceeds 2^32 - 1");
  std::vector<std::uint32_t> idx(channels);
  std::iota(idx.begin(), idx.end(), std::uint32_t{0});
  Below32 below(rng);
  for (std::size_t i = 0; i < draws; ++i) {
    const std::size_t j = i + below(static_cast<std::uint32_t>(channels - i));
    std::swap(idx[i], idx[j]);
    mask.bits[idx[i]] = mark;
  }
  mask.cardinality = k;
  return mask;
}

int sample_layer_index(std::span<const int> eligible, Rng& rng) {
  if (eligible.empty()) throw ParameterError("eligible layer set S is empty");
  return eligible[rng.below(eligible.size())];
}

std::vector<std::size_t> pairing_permutation(std::size_t batch_size, Rng& rng) {
  std::vector<std::size_t> perm(batch_size);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = batch_size; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

}  // namespace shufflemix

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

#ifndef SHUFFLEMIX_SAMPLING_HPP
#define SHUFFLEMIX_SAMPLING_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace shufflemix {

/// xoshiro256** seeded through splitmix64.
///
/// Every variate below is derived from the raw 64-bit stream with explicitly
/// written algorithms (no std:: distributions), so a seed reproduces the same
/// draws on every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1); never returns 0.
  double uniform_open();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, bound), bound >= 1, unbiased (Lemire rejection).
  std::uint64_t below(std::uint64_t bound);
  /// Standard normal via the Marsaglia polar method.
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

  /// Seed for an independent child stream; advances this generator once.
  std::uint64_t split();

  friend bool operator==(const Rng&, const Rng&) = default;

 private:
  std::array<std::uint64_t, 4> s_{};
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// Gamma(shape, 1): Marsaglia-Tsang for shape >= 1, boosted by U^(1/shape) below 1.
double sample_gamma(double shape, Rng& rng);

/// lambda ~ Beta(alpha, alpha) as X / (X + Y) with X, Y ~ Gamma(alpha, 1).
double sample_beta(double alpha, Rng& rng);

/// Binary channel-selection vector with a fixed number of ones.
struct ChannelMask {
  std::vector<std::uint8_t> bits;
  std::size_t cardinality = 0;

  std::size_t channels() const { return bits.size(); }
  /// ||m|| / C', the fraction of channels actually mixed.
  double realized_ratio() const {
    return static_cast<double>(cardinality) / static_cast<double>(bits.size());
  }
  bool selected(std::size_t c) const { return bits[c] != 0; }

  static ChannelMask all_ones(std::size_t channels);
  static ChannelMask all_zeros(std::size_t channels);
  /// Throws ParameterError if any entry is outside {0,1}.
  static ChannelMask from_bits(std::vector<std::uint8_t> bits);

  friend bool operator==(const ChannelMask&, const ChannelMask&) = default;
};

/// round(r * C) with halves rounded away from zero, promoted to at least 1.
std::size_t mask_cardinality(std::size_t channels, double ratio);

/// Uniformly random subset of mask_cardinality(C, r) channels.
ChannelMask sample_channel_mask(std::size_t channels, double ratio, Rng& rng);

/// Uniform draw from the eligible hook ids.
int sample_layer_index(std::span<const int> eligible, Rng& rng);

/// Uniform random permutation of 0..batch_size-1 (Fisher-Yates); fixed points allowed.
std::vector<std::size_t> pairing_permutation(std::size_t batch_size, Rng& rng);

}  // namespace shufflemix

#endif  // SHUFFLEMIX_SAMPLING_HPP

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

#ifndef SHUFFLEMIX_DATA_HPP
#define SHUFFLEMIX_DATA_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "shufflemix/augment.hpp"
#include "shufflemix/sampling.hpp"
#include "shufflemix/tensor.hpp"

namespace shufflemix {

enum class TaskKind { kSingleLabel, kMultiLabel };

/// Per-channel valid input interval. `clamp` says whether perturbed inputs are
/// clipped back into it (images) or left unbounded (synthetic point clouds).
struct InputRange {
  std::vector<double> lo;
  std::vector<double> hi;
  bool clamp = false;
};

struct DatasetMeta {
  std::string name;
  std::size_t num_classes = 0;
  InputRange range;
  std::vector<std::size_t> class_counts;
  /// Per-channel normalization constants (images only): x = (byte - mean) / std.
  std::vector<double> norm_mean;
  std::vector<double> norm_std;
};

struct Dataset {
  Tensor inputs;
  TaskKind task = TaskKind::kSingleLabel;
  std::vector<std::size_t> labels;                  // single-label
  std::vector<std::vector<std::uint8_t>> multi;     // multilabel, K entries each
  DatasetMeta meta;

  std::size_t size() const { return inputs.shape().n; }
  /// Throws ParameterError if label count/range invariants fail.
  void validate() const;
  SoftLabel soft_label(std::size_t i) const;
  Dataset subset(std::span<const std::size_t> indices) const;
};

/// Observed per-channel min/max of the inputs, unclamped.
InputRange observed_range(const Tensor& inputs);

/// Two concentric circles in 2-D. Outer radius 1 is class 0 (ceil(n/2) points),
/// inner radius 0.5 is class 1. Angles are evenly spaced per ring, then Gaussian
/// noise of std `noise_std` is added to both coordinates and samples are shuffled.
Dataset make_circles(std::size_t n, double noise_std, Rng& rng);

/// Three concentric rings with radii 1 : 0.6 : 0.3 for classes 0, 1, 2 (class 1 is the
/// middle ring); construction otherwise as make_circles.
Dataset make_three_rings(std::size_t n, double noise_std, Rng& rng);

inline constexpr double kCirclesInnerRadius = 0.5;
inline constexpr double kRingRadii[3] = {1.0, 0.6, 0.3};

/// Multi-label points built from K class prototypes.
///
/// Prototypes p_k are drawn N(0, prototype_scale^2 I) in `dim` dimensions. Each sample
/// activates s ~ U{1,2,3} (capped at K) distinct classes and has input
/// sum_{k active} p_k + N(0, noise_std^2 I). The prototypes use the first draws of
/// `rng`, the samples the rest.
struct MultilabelRecipe {
  std::size_t dim = 8;
  double prototype_scale = 1.5;
  double noise_std = 1.0;
};
Dataset make_multilabel_synthetic(std::size_t n, std::size_t num_classes, Rng& rng,
                                  const MultilabelRecipe& recipe = {});

inline constexpr std::size_t kCifarRecordBytes = 3073;
inline constexpr std::size_t kCifarSide = 32;

struct CifarRecord {
  std::uint8_t label = 0;
  std::vector<std::uint8_t> pixels;  // 3072 bytes, R plane, G plane, B plane
};

/// Reads one CIFAR-10 binary batch. IoError (with byte offset) on missing or
/// truncated files, FormatError for label bytes above 9.
std::vector<CifarRecord> read_cifar10_batch(const std::string& path);

/// Training records from `path`: a single batch file, or a directory holding
/// data_batch_1.bin .. data_batch_5.bin (missing batches are skipped, at least one required).
std::vector<CifarRecord> read_cifar10_train(const std::string& path);
/// test_batch.bin inside `path` (or `path` itself if it is a file).
std::vector<CifarRecord> read_cifar10_test(const std::string& path);

/// Seeded stratified pick of n_per_class records per class, in class-then-draw order
/// shuffled once more so classes are interleaved.
std::vector<CifarRecord> select_per_class(const std::vector<CifarRecord>& records,
                                          std::size_t n_per_class, Rng& rng);

/// Per-channel mean and population std of the raw byte values.
void cifar_channel_stats(const std::vector<CifarRecord>& records, std::vector<double>& mean,
                         std::vector<double>& stdev);

/// Builds a normalized dataset with the given constants.
Dataset cifar_to_dataset(const std::vector<CifarRecord>& records, const std::vector<double>& mean,
                         const std::vector<double>& stdev, const std::string& name);

/// Stratified subset of the training batches, normalized with statistics of that subset.
Dataset load_cifar10_subset(const std::string& path, std::size_t n_per_class, Rng& rng);

/// Inverse of the normalization, rounded to bytes.
std::vector<std::uint8_t> denormalize_cifar(const Dataset& ds, std::size_t index);

}  // namespace shufflemix

#endif  // SHUFFLEMIX_DATA_HPP

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

#ifndef SHUFFLEMIX_TRAIN_HPP
#define SHUFFLEMIX_TRAIN_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "shufflemix/augment.hpp"
#include "shufflemix/data.hpp"
#include "shufflemix/nets.hpp"
#include "shufflemix/sampling.hpp"

namespace shufflemix {

/// Training-time method. Each maps onto an AugmentMethod (plus noise / dropout).
enum class TrainMethod {
  kErm,
  kDropout,
  kInputMixup,
  kManifoldMixup,
  kHardShuffleMix,
  kSoftShuffleMix,
  kNfm,            // manifold mixup + feature noise
  kShuffleMixNfm,  // soft shufflemix + feature noise
};

std::string_view to_string(TrainMethod m);
/// Accepts the names above plus "shufflemix" (soft) and "none" (ERM).
TrainMethod train_method_from_string(std::string_view name);
const std::vector<TrainMethod>& all_train_methods();
AugmentMethod augment_method_for(TrainMethod m);
bool uses_nfm(TrainMethod m);

struct ModelConfig {
  std::string architecture = "auto";  // "mlp", "cnn", or "auto" (by input shape)
  std::vector<std::size_t> widths;    // empty: architecture default
};

struct TrainConfig {
  TrainMethod method = TrainMethod::kSoftShuffleMix;
  double alpha = 1.0;
  double ratio_r = 0.5;
  std::vector<int> eligible_s;  // empty: every hook of the network
  double nfm_add = 0.2;
  double nfm_mult = 0.4;
  std::optional<double> threshold_m;
  double dropout_rate = 0.2;
  std::size_t epochs = 200;
  std::size_t batch_size = 128;
  double lr_init = 0.1;
  std::vector<std::size_t> lr_decay_epochs{100, 150, 180};
  double lr_decay_factor = 0.1;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  std::uint64_t seed = 0;
  /// Random left-right flips of image batches; off by default.
  bool random_flip = false;
  ModelConfig model;

  /// Throws ParameterError on invalid values.
  void validate() const;
};

/// lr_init * factor^(#{d in decay_epochs : d <= epoch}); epochs are 0-based.
double learning_rate_at(const TrainConfig& cfg, std::size_t epoch);

nlohmann::json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j);

struct RunRecord {
  nlohmann::json config;
  std::string metric_name;  // "accuracy" or "mAP"
  std::vector<double> train_loss;
  std::vector<double> test_metric;
  std::vector<double> learning_rate;
  std::vector<std::pair<std::string, double>> final_metrics;
  double wall_clock_seconds = 0.0;

  /// Deterministic content only; wall-clock time is reported separately.
  nlohmann::json to_json() const;
};

/// Builds the network the config asks for, sized to the dataset.
Network build_model(const ModelConfig& model, const Dataset& data);

/// Augmentation draws for one batch. Draw order per sample i: lambda, k, mask,
/// noise seed (only the draws the method needs). Partners come from one batch
/// permutation drawn first.
std::vector<AugmentPlan> draw_augment_plans(const Network& net, const TrainConfig& cfg,
                                            std::size_t batch_size, Rng& rng);

/// Mirrors sample n of an image batch left to right.
void flip_horizontal(Tensor& x, std::size_t n);

struct TrainResult {
  Network model;
  RunRecord record;
};

/// Mini-batch SGD with momentum and coupled weight decay over the configured epochs.
/// RNG streams derive from cfg.seed: init, data order, augmentation, dropout.
/// Throws EvaluationError naming epoch/batch when the loss diverges.
TrainResult train(const TrainConfig& cfg, const Dataset& train_set, const Dataset& test_set);

enum class PerturbKind { kNone, kWhite, kSaltPepper };

struct EvalPerturbation {
  PerturbKind kind = PerturbKind::kNone;
  double level = 0.0;

  void validate() const;
  std::string kind_name() const;
  /// "none", "white:0.1", "salt-pepper:0.02"
  static EvalPerturbation parse(std::string_view spec);
};

/// x + delta * N(0,1) per element, clamped to the range when range.clamp is set.
Tensor perturb_white_noise(const Tensor& x, double delta, Rng& rng, const InputRange& range);
/// Each element with probability gamma becomes its channel's min or max (equal odds).
Tensor perturb_salt_pepper(const Tensor& x, double gamma, Rng& rng, const InputRange& range);
Tensor apply_perturbation(const Tensor& x, const EvalPerturbation& p, Rng& rng,
                          const InputRange& range);

/// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> v);

/// Clean-forward argmax accuracy after perturbing the inputs.
double evaluate_accuracy(const Network& net, const Dataset& data, const EvalPerturbation& perturb = {},
                         std::uint64_t noise_seed = 0);

struct MapResult {
  std::vector<double> ap;  // NaN for classes without positives
  double map = 0.0;
  std::vector<std::size_t> excluded;
};

/// AP of one score column: samples ranked by score descending, ties by ascending index;
/// mean over positives of the precision at each positive's rank. NaN if no positives.
double average_precision(std::span<const double> scores, std::span<const std::uint8_t> positives);

MapResult evaluate_map(const Network& net, const Dataset& data, std::ostream* warnings = nullptr);

/// Per-class uniform subsample keeping round(f * n_c) samples of each class.
Dataset subsample_dataset(const Dataset& data, double keep_fraction, Rng& rng);

struct GridBounds {
  double x_min = -1.5, x_max = 1.5, y_min = -1.5, y_max = 1.5;
};

struct DecisionGrid {
  std::size_t resolution = 0;
  std::size_t num_classes = 0;
  std::vector<std::vector<double>> rows;  // x, y, p_0..p_{K-1}; x varies fastest
};

DecisionGrid decision_boundary_grid(const Network& net, const GridBounds& bounds,
                                    std::size_t resolution);
void write_grid_csv(const DecisionGrid& grid, std::ostream& os);

}  // namespace shufflemix

#endif  // SHUFFLEMIX_TRAIN_HPP

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

#ifndef SHUFFLEMIX_EXPERIMENT_HPP
#define SHUFFLEMIX_EXPERIMENT_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shufflemix/data.hpp"
#include "shufflemix/train.hpp"

namespace shufflemix {

/// Which dataset to build and how. Unset sizes/noise take the per-dataset defaults
/// from resolve_defaults().
struct DatasetSelector {
  std::string name = "circles";  // circles | rings3 | multilabel | cifar10
  std::optional<std::size_t> n_train;
  std::optional<std::size_t> n_test;
  std::optional<double> noise_std;
  std::size_t num_classes = 5;  // multilabel only
  std::uint64_t data_seed = 0;
  std::string data_path;        // cifar10 only
  std::size_t subset_per_class = 500;
  std::size_t test_per_class = 100;
  double keep_fraction = 1.0;
};

struct ExperimentManifest {
  std::string id = "experiment";
  TrainConfig train;
  DatasetSelector dataset;
  std::vector<EvalPerturbation> eval_perturbations;
  std::uint64_t eval_seed = 0;
  std::size_t grid_resolution = 101;
  std::optional<GridBounds> grid_bounds;
  std::string out_dir = "out";
  bool write_checkpoint = true;

  /// Fills dataset defaults (sizes, noise) so the echoed config has no hidden values.
  void resolve_defaults();
  nlohmann::json to_json() const;
  static ExperimentManifest from_json(const nlohmann::json& j);
};

struct DatasetPair {
  Dataset train;
  Dataset test;
};

/// Builds train/test sets. Synthetic sets use Rng(data_seed) for train and the next
/// split stream for test; keep_fraction subsampling uses a third stream.
DatasetPair build_datasets(const DatasetSelector& sel);

struct ExperimentOutcome {
  RunRecord record;
  Network model;
  /// method, seed, metric, perturbation, level, value
  std::vector<std::vector<std::string>> metric_rows;
};

/// Trains, evaluates the perturbation sweep, writes outputs under out_dir
/// (run_record.json, metrics.csv, boundary_grid.csv for 2-D tasks, model.ckpt,
/// timing.json) each via temp file + rename, and prints one summary line per metric.
ExperimentOutcome run_experiment_outcome(ExperimentManifest manifest, std::ostream& log);

/// CLI-facing wrapper: 0 on success, 1 with "error: ..." on stderr-like `err` otherwise.
int run_experiment(const ExperimentManifest& manifest, std::ostream& log, std::ostream& err);

/// Writes `content` to `path` through a sibling temp file and rename.
void write_file_atomic(const std::string& path, const std::string& content);

std::string format_double(double v);

}  // namespace shufflemix

#endif  // SHUFFLEMIX_EXPERIMENT_HPP

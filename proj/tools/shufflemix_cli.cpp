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

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "shufflemix/errors.hpp"
#include "shufflemix/experiment.hpp"

namespace {

template <typename T>
std::vector<T> parse_list(const std::string& s, const std::function<T(const std::string&)>& conv) {
  std::vector<T> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(conv(item));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace shufflemix;
  CLI::App app{"shufflemix: train and evaluate mixup-family hidden-state augmentation"};
  app.set_version_flag("--version", "shufflemix 0.1.0");

  // Every option is applied only when given, on top of the manifest (or the
  // built-in defaults when no manifest is passed).
  std::string manifest_path, id, method, layers, decay_epochs, widths, arch, dataset, data_path,
      out_dir;
  std::vector<std::string> eval_noise;
  double alpha = 0, ratio = 0, nfm_add = 0, nfm_mult = 0, threshold = 0, dropout = 0, lr = 0,
         decay_factor = 0, momentum = 0, weight_decay = 0, noise = 0, keep_fraction = 0;
  std::size_t epochs = 0, batch_size = 0, n_train = 0, n_test = 0, classes = 0, per_class = 0,
              test_per_class = 0, grid_resolution = 0;
  std::uint64_t seed = 0, data_seed = 0, eval_seed = 0;
  bool print_config = false, no_checkpoint = false, flip = false;

  app.add_option("--manifest", manifest_path, "JSON experiment manifest");
  app.add_option("--id", id, "Experiment id used in summaries");
  app.add_option("--method", method,
                 "erm | dropout | input-mixup | manifold-mixup | hard-shufflemix | soft-shufflemix | "
                 "nfm | shufflemix-nfm (alias: shufflemix)");
  app.add_option("--alpha", alpha, "Beta(alpha, alpha) parameter [1]");
  app.add_option("--ratio", ratio, "Fraction r of channels mixed, in (0,1] [0.5]");
  app.add_option("--layers", layers, "Eligible hook set S, comma list [all hooks]");
  app.add_option("--nfm-add", nfm_add, "Additive feature-noise level [0.2]");
  app.add_option("--nfm-mult", nfm_mult, "Multiplicative feature-noise level [0.4]");
  app.add_option("--threshold-m", threshold, "Multilabel soft-label threshold m in (0,1)");
  app.add_option("--dropout-rate", dropout, "Dropout rate for --method dropout [0.2]");
  app.add_option("--epochs", epochs, "[200]");
  app.add_option("--batch-size", batch_size, "[128]");
  app.add_option("--lr", lr, "Initial learning rate [0.1]");
  app.add_option("--lr-decay-epochs", decay_epochs, "Comma list of 0-based decay epochs [100,150,180]");
  app.add_option("--lr-decay-factor", decay_factor, "[0.1]");
  app.add_option("--momentum", momentum, "[0.9]");
  app.add_option("--weight-decay", weight_decay, "[5e-4]");
  app.add_option("--seed", seed, "Training seed [0]");
  app.add_option("--arch", arch, "auto | mlp | cnn [auto]");
  app.add_option("--widths", widths, "Comma list of hidden / stage widths");
  app.add_option("--dataset", dataset, "circles | rings3 | multilabel | cifar10 [circles]");
  app.add_option("--data-path", data_path, "CIFAR-10 binary batch directory or file");
  app.add_option("--data-seed", data_seed, "Seed for data generation / subset selection [0]");
  app.add_option("--n-train", n_train, "Synthetic training-set size");
  app.add_option("--n-test", n_test, "Synthetic test-set size");
  app.add_option("--noise", noise, "Synthetic coordinate noise std");
  app.add_option("--classes", classes, "Label count for the multilabel dataset [5]");
  app.add_option("--subset-per-class", per_class, "CIFAR-10 training images per class [500]");
  app.add_option("--test-per-class", test_per_class, "CIFAR-10 test images per class [100]");
  app.add_option("--keep-fraction", keep_fraction, "Per-class training subsample fraction [1]");
  app.add_option("--eval-noise", eval_noise, "kind:level evaluation perturbation, repeatable");
  app.add_option("--eval-seed", eval_seed, "[0]");
  app.add_option("--grid-resolution", grid_resolution, "[101]");
  app.add_option("--out-dir", out_dir, "[out]");
  app.add_flag("--flip", flip, "Random horizontal flips of image inputs during training");
  app.add_flag("--no-checkpoint", no_checkpoint, "Skip writing model.ckpt");
  app.add_flag("--print-config", print_config, "Print the resolved manifest and exit");

  CLI11_PARSE(app, argc, argv);

  ExperimentManifest m;
  try {
    if (!manifest_path.empty()) {
      std::ifstream is(manifest_path);
      if (!is) throw IoError("cannot open manifest " + manifest_path);
      m = ExperimentManifest::from_json(nlohmann::json::parse(is));
    }
    auto given = [&](const char* name) { return app.count(name) > 0; };
    TrainConfig& t = m.train;
    DatasetSelector& d = m.dataset;
    if (given("--id")) m.id = id;
    if (given("--method")) t.method = train_method_from_string(method);
    if (given("--alpha")) t.alpha = alpha;
    if (given("--ratio")) t.ratio_r = ratio;
    if (given("--layers")) {
      t.eligible_s = parse_list<int>(layers, [](const std::string& s) { return std::stoi(s); });
    }
    if (given("--nfm-add")) t.nfm_add = nfm_add;
    if (given("--nfm-mult")) t.nfm_mult = nfm_mult;
    if (given("--threshold-m")) t.threshold_m = threshold;
    if (given("--dropout-rate")) t.dropout_rate = dropout;
    if (given("--epochs")) t.epochs = epochs;
    if (given("--batch-size")) t.batch_size = batch_size;
    if (given("--lr")) t.lr_init = lr;
    if (given("--lr-decay-epochs")) {
      t.lr_decay_epochs = parse_list<std::size_t>(
          decay_epochs, [](const std::string& s) { return static_cast<std::size_t>(std::stoul(s)); });
    }
    if (given("--lr-decay-factor")) t.lr_decay_factor = decay_factor;
    if (given("--momentum")) t.momentum = momentum;
    if (given("--weight-decay")) t.weight_decay = weight_decay;
    if (given("--seed")) t.seed = seed;
    if (given("--arch")) t.model.architecture = arch;
    if (given("--widths")) {
      t.model.widths = parse_list<std::size_t>(
          widths, [](const std::string& s) { return static_cast<std::size_t>(std::stoul(s)); });
    }
    if (given("--dataset")) d.name = dataset;
    if (given("--data-path")) d.data_path = data_path;
    if (given("--data-seed")) d.data_seed = data_seed;
    if (given("--n-train")) d.n_train = n_train;
    if (given("--n-test")) d.n_test = n_test;
    if (given("--noise")) d.noise_std = noise;
    if (given("--classes")) d.num_classes = classes;
    if (given("--subset-per-class")) d.subset_per_class = per_class;
    if (given("--test-per-class")) d.test_per_class = test_per_class;
    if (given("--keep-fraction")) d.keep_fraction = keep_fraction;
    if (given("--eval-noise")) {
      m.eval_perturbations.clear();
      for (const auto& s : eval_noise) m.eval_perturbations.push_back(EvalPerturbation::parse(s));
    }
    if (given("--eval-seed")) m.eval_seed = eval_seed;
    if (given("--grid-resolution")) m.grid_resolution = grid_resolution;
    if (given("--out-dir")) m.out_dir = out_dir;
    if (flip) t.random_flip = true;
    if (no_checkpoint) m.write_checkpoint = false;

    if (print_config) {
      m.resolve_defaults();
      std::cout << m.to_json().dump(2) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return run_experiment(m, std::cout, std::cerr);
}

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

#include "shufflemix/experiment.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "shufflemix/errors.hpp"

namespace shufflemix {

std::string format_double(double v) {
  // Shortest text that round-trips to the same double.
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + tmp + " for writing");
    os << content;
    if (!os) throw IoError("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw IoError("cannot rename " + tmp + " to " + path);
}

void ExperimentManifest::resolve_defaults() {
  DatasetSelector& d = dataset;
  if (d.name == "circles") {
    if (!d.n_train) d.n_train = 400;
    if (!d.n_test) d.n_test = 400;
    if (!d.noise_std) d.noise_std = 0.08;
  } else if (d.name == "rings3") {
    if (!d.n_train) d.n_train = 600;
    if (!d.n_test) d.n_test = 600;
    if (!d.noise_std) d.noise_std = 0.12;
  } else if (d.name == "multilabel") {
    if (!d.n_train) d.n_train = 2000;
    if (!d.n_test) d.n_test = 1000;
    if (!d.noise_std) d.noise_std = MultilabelRecipe{}.noise_std;
  } else if (d.name == "cifar10") {
    if (d.data_path.empty()) throw ParameterError("cifar10 needs --data-path");
  } else {
    throw ParameterError("unknown dataset '" + d.name + "'");
  }
  if (!grid_bounds && (d.name == "circles" || d.name == "rings3")) grid_bounds = GridBounds{};
}

nlohmann::json ExperimentManifest::to_json() const {
  nlohmann::json j;
  j["id"] = id;
  j["train"] = shufflemix::to_json(train);
  nlohmann::json d;
  d["name"] = dataset.name;
  d["n_train"] = dataset.n_train ? nlohmann::json(*dataset.n_train) : nlohmann::json(nullptr);
  d["n_test"] = dataset.n_test ? nlohmann::json(*dataset.n_test) : nlohmann::json(nullptr);
  d["noise_std"] = dataset.noise_std ? nlohmann::json(*dataset.noise_std) : nlohmann::json(nullptr);
  d["num_classes"] = dataset.num_classes;
  d["data_seed"] = dataset.data_seed;
  d["data_path"] = dataset.data_path;
  d["subset_per_class"] = dataset.subset_per_class;
  d["test_per_class"] = dataset.test_per_class;
  d["keep_fraction"] = dataset.keep_fraction;
  j["dataset"] = std::move(d);
  nlohmann::json ev = nlohmann::json::array();
  for (const auto& p : eval_perturbations) {
    ev.push_back(p.kind == PerturbKind::kNone ? std::string("none")
                                              : p.kind_name() + ":" + format_double(p.level));
  }
  j["eval_perturbations"] = std::move(ev);
  j["eval_seed"] = eval_seed;
  j["eval_noise_space"] = "normalized-inputs";
  j["grid_resolution"] = grid_resolution;
  if (grid_bounds) {
    j["grid_bounds"] = {grid_bounds->x_min, grid_bounds->x_max, grid_bounds->y_min, grid_bounds->y_max};
  } else {
    j["grid_bounds"] = nullptr;
  }
  j["out_dir"] = out_dir;
  j["write_checkpoint"] = write_checkpoint;
  return j;
}

ExperimentManifest ExperimentManifest::from_json(const nlohmann::json& j) {
  ExperimentManifest m;
  if (j.contains("id")) m.id = j["id"].get<std::string>();
  if (j.contains("train")) m.train = train_config_from_json(j["train"]);
  if (j.contains("dataset")) {
    const auto& d = j["dataset"];
    auto opt = [&](const char* key, auto& field) {
      if (d.contains(key) && !d[key].is_null()) {
        field = d[key].get<typename std::decay_t<decltype(field)>::value_type>();
      }
    };
    auto get = [&](const char* key, auto& field) {
      if (d.contains(key) && !d[key].is_null()) field = d[key].get<std::decay_t<decltype(field)>>();
    };
    get("name", m.dataset.name);
    opt("n_train", m.dataset.n_train);
    opt("n_test", m.dataset.n_test);
    opt("noise_std", m.dataset.noise_std);
    get("num_classes", m.dataset.num_classes);
    get("data_seed", m.dataset.data_seed);
    get("data_path", m.dataset.data_path);
    get("subset_per_class", m.dataset.subset_per_class);
    get("test_per_class", m.dataset.test_per_class);
    get("keep_fraction", m.dataset.keep_fraction);
  }
  if (j.contains("eval_perturbations")) {
    for (const auto& p : j["eval_perturbations"]) {
      m.eval_perturbations.push_back(EvalPerturbation::parse(p.get<std::string>()));
    }
  }
  if (j.contains("eval_seed")) m.eval_seed = j["eval_seed"].get<std::uint64_t>();
  if (j.contains("grid_resolution")) m.grid_resolution = j["grid_resolution"].get<std::size_t>();
  if (j.contains("grid_bounds") && !j["grid_bounds"].is_null()) {
    const auto b = j["grid_bounds"].get<std::vector<double>>();
    if (b.size() != 4) throw ParameterError("grid_bounds needs 4 numbers");
    m.grid_bounds = GridBounds{b[0], b[1], b[2], b[3]};
  }
  if (j.contains("out_dir")) m.out_dir = j["out_dir"].get<std::string>();
  if (j.contains("write_checkpoint")) m.write_checkpoint = j["write_checkpoint"].get<bool>();
  return m;
}

DatasetPair build_datasets(const DatasetSelector& sel) {
  Rng master(sel.data_seed);
  Rng train_rng(master.split());
  Rng test_rng(master.split());
  Rng subsample_rng(master.split());
  DatasetPair pair;
  if (sel.name == "circles") {
    pair.train = make_circles(sel.n_train.value(), sel.noise_std.value(), train_rng);
    pair.test = make_circles(sel.n_test.value(), sel.noise_std.value(), test_rng);
  } else if (sel.name == "rings3") {
    pair.train = make_three_rings(sel.n_train.value(), sel.noise_std.value(), train_rng);
    pair.test = make_three_rings(sel.n_test.value(), sel.noise_std.value(), test_rng);
  } else if (sel.name == "multilabel") {
    // Train and test must share prototypes: generate once, then split.
    MultilabelRecipe recipe;
    recipe.noise_std = sel.noise_std.value();
    const std::size_t n_train = sel.n_train.value();
    const std::size_t n_test = sel.n_test.value();
    Dataset all = make_multilabel_synthetic(n_train + n_test, sel.num_classes, train_rng, recipe);
    std::vector<std::size_t> tr(n_train), te(n_test);
    for (std::size_t i = 0; i < n_train; ++i) tr[i] = i;
    for (std::size_t i = 0; i < n_test; ++i) te[i] = n_train + i;
    pair.train = all.subset(tr);
    pair.test = all.subset(te);
    pair.train.meta.range = observed_range(pair.train.inputs);
    pair.test.meta.range = pair.train.meta.range;
  } else if (sel.name == "cifar10") {
    const auto picked = select_per_class(read_cifar10_train(sel.data_path), sel.subset_per_class, train_rng);
    std::vector<double> mean, stdev;
    cifar_channel_stats(picked, mean, stdev);
    pair.train = cifar_to_dataset(picked, mean, stdev, "cifar10");
    const auto test_picked = select_per_class(read_cifar10_test(sel.data_path), sel.test_per_class, test_rng);
    pair.test = cifar_to_dataset(test_picked, mean, stdev, "cifar10-test");
  } else {
    throw ParameterError("unknown dataset '" + sel.name + "'");
  }
  if (sel.keep_fraction != 1.0) pair.train = subsample_dataset(pair.train, sel.keep_fraction, subsample_rng);
  return pair;
}

ExperimentOutcome run_experiment_outcome(ExperimentManifest manifest, std::ostream& log) {
  manifest.resolve_defaults();
  manifest.train.validate();
  for (const auto& p : manifest.eval_perturbations) p.validate();

  const DatasetPair data = build_datasets(manifest.dataset);
  TrainResult result = train(manifest.train, data.train, data.test);
  RunRecord& rec = result.record;
  rec.config = manifest.to_json();
  // Where the record lands is not part of the run; keeps reruns elsewhere byte-identical.
  rec.config.erase("out_dir");

  const std::string method(to_string(manifest.train.method));
  const std::string seed = std::to_string(manifest.train.seed);
  ExperimentOutcome outcome;
  auto row = [&](const std::string& metric, const std::string& kind, double level, double value) {
    outcome.metric_rows.push_back({method, seed, metric, kind, format_double(level), format_double(value)});
  };

  if (data.test.task == TaskKind::kSingleLabel) {
    std::vector<EvalPerturbation> sweep{EvalPerturbation{}};
    for (const auto& p : manifest.eval_perturbations)
      if (p.kind != PerturbKind::kNone) sweep.push_back(p);
    for (const auto& p : sweep) {
      const double acc = evaluate_accuracy(result.model, data.test, p, manifest.eval_seed);
      row("accuracy", p.kind_name(), p.level, acc);
      if (p.kind != PerturbKind::kNone) {
        rec.final_metrics.emplace_back("test_accuracy@" + p.kind_name() + ":" + format_double(p.level), acc);
      }
    }
  } else {
    const MapResult m = evaluate_map(result.model, data.test, &log);
    row("mAP", "none", 0.0, m.map);
    for (std::size_t c = 0; c < m.ap.size(); ++c) {
      row("AP_" + std::to_string(c), "none", 0.0, m.ap[c]);
      rec.final_metrics.emplace_back("test_AP_" + std::to_string(c), m.ap[c]);
    }
    for (const auto& p : manifest.eval_perturbations) {
      if (p.kind != PerturbKind::kNone) log << "note: perturbation sweep skipped for multilabel task\n";
    }
  }
  row("train_loss", "none", 0.0, rec.train_loss.back());

  namespace fs = std::filesystem;
  fs::create_directories(manifest.out_dir);
  const fs::path out(manifest.out_dir);
  write_file_atomic((out / "run_record.json").string(), rec.to_json().dump(2) + "\n");

  std::ostringstream csv;
  csv << "method,seed,metric,perturbation,level,value\n";
  for (const auto& r : outcome.metric_rows) {
    for (std::size_t i = 0; i < r.size(); ++i) csv << (i ? "," : "") << r[i];
    csv << '\n';
  }
  write_file_atomic((out / "metrics.csv").string(), csv.str());

  if (manifest.grid_bounds && result.model.input == Shape{1, 2, 1, 1}) {
    std::ostringstream g;
    write_grid_csv(decision_boundary_grid(result.model, *manifest.grid_bounds, manifest.grid_resolution), g);
    write_file_atomic((out / "boundary_grid.csv").string(), g.str());
  }
  if (manifest.write_checkpoint) save_checkpoint(result.model, (out / "model.ckpt").string());
  nlohmann::json timing{{"wall_clock_seconds", rec.wall_clock_seconds}};
  write_file_atomic((out / "timing.json").string(), timing.dump(2) + "\n");

  for (const auto& r : outcome.metric_rows) {
    log << manifest.id << " " << r[0] << " seed=" << r[1] << " " << r[2] << "[" << r[3];
    if (r[3] != "none") log << ":" << r[4];
    log << "] = " << r[5] << "\n";
  }
  outcome.record = std::move(rec);
  outcome.model = std::move(result.model);
  return outcome;
}

int run_experiment(const ExperimentManifest& manifest, std::ostream& log, std::ostream& err) {
  try {
    run_experiment_outcome(manifest, log);
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace shufflemix

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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "shufflemix/errors.hpp"
#include "shufflemix/experiment.hpp"

namespace shufflemix {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& p) {
  const std::string s = slurp(p);
  return s.substr(0, s.find('\n'));
}

class ExperimentTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("shufflemix_exp_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  ExperimentManifest small(const std::string& dataset, const std::string& sub) const {
    ExperimentManifest m;
    m.id = "t";
    m.dataset.name = dataset;
    m.dataset.n_train = 60;
    m.dataset.n_test = 30;
    m.train.epochs = 3;
    m.train.batch_size = 16;
    m.train.lr_decay_epochs = {2};
    m.train.model.widths = {8, 8};
    m.grid_resolution = 5;
    m.out_dir = (root_ / sub).string();
    return m;
  }

  fs::path root_;
};

TEST_F(ExperimentTest, RerunIsByteIdentical) {
  ExperimentManifest a = small("rings3", "a");
  a.eval_perturbations = {EvalPerturbation::parse("white:0.1"), EvalPerturbation::parse("sp:0.05")};
  ExperimentManifest b = a;
  b.out_dir = (root_ / "b").string();
  std::ostringstream log_a, log_b;
  run_experiment_outcome(a, log_a);
  run_experiment_outcome(b, log_b);
  for (const char* f : {"run_record.json", "metrics.csv", "boundary_grid.csv", "model.ckpt"}) {
    ASSERT_TRUE(fs::exists(fs::path(a.out_dir) / f)) << f;
    EXPECT_EQ(slurp(fs::path(a.out_dir) / f), slurp(fs::path(b.out_dir) / f)) << f;
  }
  EXPECT_EQ(log_a.str(), log_b.str());
  EXPECT_TRUE(fs::exists(fs::path(a.out_dir) / "timing.json"));
}

TEST_F(ExperimentTest, OutputsHaveExpectedShape) {
  ExperimentManifest m = small("circles", "c");
  m.eval_perturbations = {EvalPerturbation::parse("white:0.2")};
  std::ostringstream log;
  const auto outcome = run_experiment_outcome(m, log);
  const fs::path out(m.out_dir);
  EXPECT_EQ(first_line(out / "metrics.csv"), "method,seed,metric,perturbation,level,value");
  EXPECT_EQ(first_line(out / "boundary_grid.csv"), "x,y,p_0,p_1");

  const auto rec = nlohmann::json::parse(slurp(out / "run_record.json"));
  EXPECT_EQ(rec["metric"], "accuracy");
  EXPECT_EQ(rec["history"]["epoch"].size(), 3u);
  EXPECT_EQ(rec["config"]["train"]["epochs"], 3);
  EXPECT_EQ(rec["config"]["dataset"]["n_train"], 60);
  EXPECT_TRUE(rec["final"].contains("test_accuracy"));
  EXPECT_TRUE(rec["final"].contains("test_accuracy@white:0.2"));
  EXPECT_FALSE(rec.contains("wall_clock_seconds"));

  // clean, white, train_loss
  EXPECT_EQ(outcome.metric_rows.size(), 3u);
  EXPECT_NE(log.str().find("accuracy[white:0.2]"), std::string::npos) << log.str();
  const auto ckpt = load_checkpoint((out / "model.ckpt").string());
  EXPECT_EQ(ckpt.flatten_parameters(), outcome.model.flatten_parameters());
}

TEST_F(ExperimentTest, MultilabelReportsPerClassAp) {
  ExperimentManifest m = small("multilabel", "m");
  m.dataset.num_classes = 4;
  m.train.threshold_m = 0.3;
  std::ostringstream log;
  run_experiment_outcome(m, log);
  const auto rec = nlohmann::json::parse(slurp(fs::path(m.out_dir) / "run_record.json"));
  EXPECT_EQ(rec["metric"], "mAP");
  EXPECT_TRUE(rec["final"].contains("test_AP_3"));
  EXPECT_FALSE(fs::exists(fs::path(m.out_dir) / "boundary_grid.csv"));
}

TEST_F(ExperimentTest, ManifestJsonRoundTrip) {
  ExperimentManifest m = small("rings3", "j");
  m.eval_perturbations = {EvalPerturbation::parse("white:0.3")};
  m.resolve_defaults();
  const auto back = ExperimentManifest::from_json(m.to_json());
  EXPECT_EQ(back.to_json(), m.to_json());
}

TEST_F(ExperimentTest, ErrorsBecomeExitCodeOne) {
  ExperimentManifest m = small("rings3", "e");
  m.train.alpha = 0.0;
  std::ostringstream log, err;
  EXPECT_EQ(run_experiment(m, log, err), 1);
  EXPECT_EQ(err.str().rfind("error: ", 0), 0u) << err.str();

  ExperimentManifest unknown = small("mnist", "u");
  std::ostringstream err2;
  EXPECT_EQ(run_experiment(unknown, log, err2), 1);
  EXPECT_NE(err2.str().find("mnist"), std::string::npos);

  ExperimentManifest cifar = small("cifar10", "x");
  cifar.dataset.data_path = (root_ / "nowhere").string();
  std::ostringstream err3;
  EXPECT_EQ(run_experiment(cifar, log, err3), 1);
}

TEST_F(ExperimentTest, EveryMethodRuns) {
  for (auto method : all_train_methods()) {
    ExperimentManifest m = small("rings3", std::string(to_string(method)));
    m.train.method = method;
    m.train.epochs = 1;
    m.train.lr_decay_epochs.clear();
    m.write_checkpoint = false;
    std::ostringstream log, err;
    EXPECT_EQ(run_experiment(m, log, err), 0) << to_string(method) << ": " << err.str();
  }
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0), "1");
  for (double v : {1.0 / 3.0, 2.5e-17, 123456.789}) EXPECT_EQ(std::stod(format_double(v)), v);
}

#ifdef SHUFFLEMIX_CLI_PATH
TEST_F(ExperimentTest, CliRunsTwiceIdentically) {
  const std::string cli = SHUFFLEMIX_CLI_PATH;
  auto run = [&](const std::string& sub) {
    const std::string cmd = "\"" + cli + "\" --dataset circles --method soft-shufflemix --epochs 2 " +
                            "--n-train 40 --n-test 20 --widths 6,6 --lr-decay-epochs 1 " +
                            "--eval-noise white:0.1 --out-dir \"" + (root_ / sub).string() + "\" > \"" +
                            (root_ / (sub + ".log")).string() + "\" 2>&1";
    return std::system(cmd.c_str());
  };
  fs::create_directories(root_);
  ASSERT_EQ(run("one"), 0) << slurp(root_ / "one.log");
  ASSERT_EQ(run("two"), 0);
  EXPECT_EQ(slurp(root_ / "one" / "run_record.json"), slurp(root_ / "two" / "run_record.json"));
  EXPECT_EQ(slurp(root_ / "one" / "metrics.csv"), slurp(root_ / "two" / "metrics.csv"));

  const std::string bad = "\"" + cli + "\" --method nonsense --out-dir \"" + (root_ / "bad").string() +
                          "\" > /dev/null 2>&1";
  EXPECT_NE(std::system(bad.c_str()), 0);
}
#endif

}  // namespace
}  // namespace shufflemix

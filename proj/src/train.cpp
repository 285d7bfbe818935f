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

#include "shufflemix/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include "shufflemix/errors.hpp"

namespace shufflemix {

std::string_view to_string(TrainMethod m) {
  switch (m) {
    case TrainMethod::kErm: return "erm";
    case TrainMethod::kDropout: return "dropout";
    case TrainMethod::kInputMixup: return "input-mixup";
    case TrainMethod::kManifoldMixup: return "manifold-mixup";
    case TrainMethod::kHardShuffleMix: return "hard-shufflemix";
    case TrainMethod::kSoftShuffleMix: return "soft-shufflemix";
    case TrainMethod::kNfm: return "nfm";
    case TrainMethod::kShuffleMixNfm: return "shufflemix-nfm";
  }
  return "unknown";
}

const std::vector<TrainMethod>& all_train_methods() {
  static const std::vector<TrainMethod> methods{
      TrainMethod::kErm,           TrainMethod::kDropout,        TrainMethod::kInputMixup,
      TrainMethod::kManifoldMixup, TrainMethod::kHardShuffleMix, TrainMethod::kSoftShuffleMix,
      TrainMethod::kNfm,           TrainMethod::kShuffleMixNfm};
  return methods;
}

TrainMethod train_method_from_string(std::string_view name) {
  if (name == "shufflemix") return TrainMethod::kSoftShuffleMix;
  if (name == "none" || name == "baseline") return TrainMethod::kErm;
  for (auto m : all_train_methods())
    if (to_string(m) == name) return m;
  throw ParameterError("unknown method '" + std::string(name) + "'");
}

AugmentMethod augment_method_for(TrainMethod m) {
  switch (m) {
    case TrainMethod::kErm:
    case TrainMethod::kDropout: return AugmentMethod::kNone;
    case TrainMethod::kInputMixup: return AugmentMethod::kInputMixup;
    case TrainMethod::kManifoldMixup:
    case TrainMethod::kNfm: return AugmentMethod::kManifoldMixup;
    case TrainMethod::kHardShuffleMix: return AugmentMethod::kHardShuffleMix;
    case TrainMethod::kSoftShuffleMix:
    case TrainMethod::kShuffleMixNfm: return AugmentMethod::kSoftShuffleMix;
  }
  return AugmentMethod::kNone;
}

bool uses_nfm(TrainMethod m) { return m == TrainMethod::kNfm || m == TrainMethod::kShuffleMixNfm; }

void TrainConfig::validate() const {
  if (!(alpha > 0.0)) throw ParameterError("alpha must be positive");
  if (!(ratio_r > 0.0 && ratio_r <= 1.0)) throw ParameterError("ratio r must lie in (0,1]");
  if (nfm_add < 0.0 || nfm_mult < 0.0) throw ParameterError("NFM levels must be non-negative");
  if (threshold_m && !(*threshold_m > 0.0 && *threshold_m < 1.0)) {
    throw ParameterError("threshold m must lie in (0,1)");
  }
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) throw ParameterError("dropout rate must lie in [0,1)");
  if (epochs == 0) throw ParameterError("epochs must be positive");
  if (batch_size == 0) throw ParameterError("batch size must be positive");
  if (!(lr_init > 0.0)) throw ParameterError("learning rate must be positive");
  for (std::size_t i = 0; i < lr_decay_epochs.size(); ++i) {
    if (lr_decay_epochs[i] >= epochs) throw ParameterError("LR decay epoch beyond the run");
    if (i > 0 && lr_decay_epochs[i] <= lr_decay_epochs[i - 1]) {
      throw ParameterError("LR decay epochs must be strictly increasing");
    }
  }
  if (momentum < 0.0 || weight_decay < 0.0) throw ParameterError("momentum/weight decay must be >= 0");
}

double learning_rate_at(const TrainConfig& cfg, std::size_t epoch) {
  double lr = cfg.lr_init;
  for (auto d : cfg.lr_decay_epochs)
    if (d <= epoch) lr *= cfg.lr_decay_factor;
  return lr;
}

nlohmann::json to_json(const TrainConfig& cfg) {
  nlohmann::json j;
  j["method"] = std::string(to_string(cfg.method));
  j["alpha"] = cfg.alpha;
  j["ratio_r"] = cfg.ratio_r;
  j["eligible_s"] = cfg.eligible_s;
  j["nfm_add"] = cfg.nfm_add;
  j["nfm_mult"] = cfg.nfm_mult;
  j["threshold_m"] = cfg.threshold_m ? nlohmann::json(*cfg.threshold_m) : nlohmann::json(nullptr);
  j["dropout_rate"] = cfg.dropout_rate;
  j["epochs"] = cfg.epochs;
  j["batch_size"] = cfg.batch_size;
  j["lr_init"] = cfg.lr_init;
  j["lr_decay_epochs"] = cfg.lr_decay_epochs;
  j["lr_decay_factor"] = cfg.lr_decay_factor;
  j["momentum"] = cfg.momentum;
  j["weight_decay"] = cfg.weight_decay;
  j["seed"] = cfg.seed;
  j["random_flip"] = cfg.random_flip;
  j["model"] = {{"architecture", cfg.model.architecture}, {"widths", cfg.model.widths}};
  return j;
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  if (j.contains("method")) c.method = train_method_from_string(j["method"].get<std::string>());
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key) && !j[key].is_null()) field = j[key].get<std::decay_t<decltype(field)>>();
  };
  get("alpha", c.alpha);
  get("ratio_r", c.ratio_r);
  get("eligible_s", c.eligible_s);
  get("nfm_add", c.nfm_add);
  get("nfm_mult", c.nfm_mult);
  if (j.contains("threshold_m") && !j["threshold_m"].is_null()) c.threshold_m = j["threshold_m"].get<double>();
  get("dropout_rate", c.dropout_rate);
  get("epochs", c.epochs);
  get("batch_size", c.batch_size);
  get("lr_init", c.lr_init);
  get("lr_decay_epochs", c.lr_decay_epochs);
  get("lr_decay_factor", c.lr_decay_factor);
  get("momentum", c.momentum);
  get("weight_decay", c.weight_decay);
  get("seed", c.seed);
  get("random_flip", c.random_flip);
  if (j.contains("model")) {
    const auto& m = j["model"];
    if (m.contains("architecture")) c.model.architecture = m["architecture"].get<std::string>();
    if (m.contains("widths")) c.model.widths = m["widths"].get<std::vector<std::size_t>>();
  }
  return c;
}

nlohmann::json RunRecord::to_json() const {
  nlohmann::json j;
  j["schema"] = "shufflemix.run_record/1";
  j["config"] = config;
  j["metric"] = metric_name;
  std::vector<std::size_t> epochs(train_loss.size());
  std::iota(epochs.begin(), epochs.end(), std::size_t{0});
  j["history"] = {{"epoch", epochs},
                  {"train_loss", train_loss},
                  {"test_metric", test_metric},
                  {"learning_rate", learning_rate}};
  nlohmann::json fin = nlohmann::json::object();
  for (const auto& [k, v] : final_metrics) fin[k] = v;
  j["final"] = std::move(fin);
  return j;
}

Network build_model(const ModelConfig& model, const Dataset& data) {
  const Shape in = data.inputs.shape().with_batch(1);
  std::string arch = model.architecture;
  if (arch == "auto") arch = (in.h == 1 && in.w == 1) ? "mlp" : "cnn";
  if (arch == "mlp") {
    if (in.h != 1 || in.w != 1) throw ParameterError("MLP needs flat [N,C,1,1] inputs");
    const std::vector<std::size_t> widths =
        model.widths.empty() ? std::vector<std::size_t>{16, 16, 16} : model.widths;
    return build_mlp(in.c, widths, data.meta.num_classes);
  }
  if (arch == "cnn") {
    const std::vector<std::size_t> widths =
        model.widths.empty() ? std::vector<std::size_t>{16, 32, 32, 64} : model.widths;
    return build_small_cnn(in, widths, data.meta.num_classes);
  }
  throw ParameterError("unknown architecture '" + arch + "'");
}

std::vector<AugmentPlan> draw_augment_plans(const Network& net, const TrainConfig& cfg,
                                            std::size_t batch_size, Rng& rng) {
  const AugmentMethod method = augment_method_for(cfg.method);
  std::vector<AugmentPlan> plans(batch_size);
  if (method == AugmentMethod::kNone) {
    for (std::size_t i = 0; i < batch_size; ++i) plans[i] = AugmentPlan::none(i);
    return plans;
  }
  const auto perm = pairing_permutation(batch_size, rng);
  for (std::size_t i = 0; i < batch_size; ++i) {
    AugmentPlan& p = plans[i];
    p.method = method;
    p.partner = perm[i];
    p.lambda = method == AugmentMethod::kHardShuffleMix ? 0.0 : sample_beta(cfg.alpha, rng);
    p.k = method == AugmentMethod::kInputMixup ? 0 : sample_layer_index(net.eligible, rng);
    if (is_shufflemix(method)) {
      p.mask = sample_channel_mask(net.hook_shape(p.k, 1).c, cfg.ratio_r, rng);
    }
    if (uses_nfm(cfg.method)) p.nfm = NfmSpec{cfg.nfm_add, cfg.nfm_mult, rng.split()};
  }
  return plans;
}

void flip_horizontal(Tensor& x, std::size_t n) {
  const Shape& s = x.shape();
  for (std::size_t c = 0; c < s.c; ++c) {
    auto plane = x.channel(n, c);
    for (std::size_t y = 0; y < s.h; ++y) {
      auto row = plane.subspan(y * s.w, s.w);
      std::reverse(row.begin(), row.end());
    }
  }
}

namespace {

constexpr std::size_t kEvalChunk = 256;

Tensor chunked_forward(const Network& net, const Tensor& inputs) {
  const std::size_t n = inputs.shape().n;
  Tensor logits(Shape{n, net.num_classes, 1, 1});
  std::vector<std::size_t> rows;
  for (std::size_t start = 0; start < n; start += kEvalChunk) {
    rows.clear();
    for (std::size_t i = start; i < std::min(n, start + kEvalChunk); ++i) rows.push_back(i);
    scatter_rows(logits, forward(net, gather_rows(inputs, rows)), rows);
  }
  return logits;
}

double test_metric(const Network& net, const Dataset& test) {
  if (test.task == TaskKind::kSingleLabel) return evaluate_accuracy(net, test);
  return evaluate_map(net, test).map;
}

}  // namespace

TrainResult train(const TrainConfig& cfg, const Dataset& train_set, const Dataset& test_set) {
  const auto started = std::chrono::steady_clock::now();
  cfg.validate();
  train_set.validate();
  test_set.validate();
  if (train_set.size() == 0) throw ParameterError("training set is empty");
  if (test_set.size() == 0) throw ParameterError("test set is empty");

  Rng master(cfg.seed);
  Rng init_rng(master.split());
  Rng order_rng(master.split());
  Rng aug_rng(master.split());
  Rng drop_rng(master.split());
  Rng flip_rng(master.split());

  Network net = build_model(cfg.model, train_set);
  if (!cfg.eligible_s.empty()) net.set_eligible(cfg.eligible_s);
  initialize_parameters(net, init_rng);

  RunRecord rec;
  rec.config = to_json(cfg);
  rec.metric_name = test_set.task == TaskKind::kSingleLabel ? "accuracy" : "mAP";

  std::vector<double> params = net.flatten_parameters();
  std::vector<double> velocity(params.size(), 0.0);
  const std::size_t n = train_set.size();
  const bool multilabel = train_set.task == TaskKind::kMultiLabel;
  const DropoutSpec no_dropout{};

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = learning_rate_at(cfg, epoch);
    const auto order = pairing_permutation(n, order_rng);
    double loss_sum = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size, ++batch_index) {
      const std::size_t end = std::min(n, start + cfg.batch_size);
      std::vector<std::size_t> rows(order.begin() + static_cast<std::ptrdiff_t>(start),
                                    order.begin() + static_cast<std::ptrdiff_t>(end));
      Tensor x = gather_rows(train_set.inputs, rows);
      if (cfg.random_flip) {
        for (std::size_t i = 0; i < rows.size(); ++i)
          if (flip_rng.bernoulli(0.5)) flip_horizontal(x, i);
      }
      std::vector<SoftLabel> labels;
      labels.reserve(rows.size());
      for (auto r : rows) labels.push_back(train_set.soft_label(r));

      const auto plans = draw_augment_plans(net, cfg, rows.size(), aug_rng);
      DropoutSpec dropout = no_dropout;
      if (cfg.method == TrainMethod::kDropout) dropout = {cfg.dropout_rate, drop_rng.next_u64()};

      InjectionTrace trace;
      BatchOutput out = forward_with_injection(net, x, labels, plans, &trace, dropout);
      auto diverged = [&](const std::string& what) {
        return EvaluationError("training diverged (" + what + ") at epoch " + std::to_string(epoch) +
                               ", batch " + std::to_string(batch_index));
      };
      if (!out.logits.all_finite()) throw diverged("non-finite logits");
      LossResult loss;
      if (multilabel) {
        std::vector<SoftLabel> targets;
        targets.reserve(rows.size());
        for (const auto& y : out.mixed_labels) {
          targets.push_back(cfg.threshold_m ? threshold_labels(y, *cfg.threshold_m) : positive_labels(y));
        }
        loss = bce_multilabel(out.logits, targets);
      } else {
        loss = soft_cross_entropy(out.logits, out.mixed_labels);
      }
      if (!std::isfinite(loss.loss)) {
        throw diverged("non-finite loss");
      }
      loss_sum += loss.loss * static_cast<double>(rows.size());

      const auto grads = backward_with_injection(net, trace, loss.grad);
      for (std::size_t i = 0; i < params.size(); ++i) {
        velocity[i] = cfg.momentum * velocity[i] + grads[i] + cfg.weight_decay * params[i];
        params[i] -= lr * velocity[i];
      }
      net.assign_parameters(params);
    }
    rec.train_loss.push_back(loss_sum / static_cast<double>(n));
    rec.learning_rate.push_back(lr);
    rec.test_metric.push_back(test_metric(net, test_set));
  }

  rec.final_metrics.emplace_back("test_" + rec.metric_name, rec.test_metric.back());
  rec.final_metrics.emplace_back("train_" + rec.metric_name, test_metric(net, train_set));
  rec.final_metrics.emplace_back("final_train_loss", rec.train_loss.back());
  rec.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return {std::move(net), std::move(rec)};
}

void EvalPerturbation::validate() const {
  if (level < 0.0) throw ParameterError("perturbation level must be non-negative");
  if (kind == PerturbKind::kSaltPepper && level > 1.0) {
    throw ParameterError("salt-and-pepper level must lie in [0,1]");
  }
}

std::string EvalPerturbation::kind_name() const {
  switch (kind) {
    case PerturbKind::kNone: return "none";
    case PerturbKind::kWhite: return "white";
    case PerturbKind::kSaltPepper: return "salt-pepper";
  }
  return "unknown";
}

EvalPerturbation EvalPerturbation::parse(std::string_view spec) {
  if (spec == "none") return {};
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw ParameterError("perturbation must look like kind:level, got '" + std::string(spec) + "'");
  }
  const std::string kind(spec.substr(0, colon));
  const std::string level(spec.substr(colon + 1));
  EvalPerturbation p;
  if (kind == "white") {
    p.kind = PerturbKind::kWhite;
  } else if (kind == "salt-pepper" || kind == "saltpepper" || kind == "sp") {
    p.kind = PerturbKind::kSaltPepper;
  } else if (kind == "none") {
    p.kind = PerturbKind::kNone;
  } else {
    throw ParameterError("unknown perturbation kind '" + kind + "'");
  }
  try {
    std::size_t used = 0;
    p.level = std::stod(level, &used);
    if (used != level.size()) throw std::invalid_argument(level);
  } catch (const std::exception&) {
    throw ParameterError("bad perturbation level '" + level + "'");
  }
  p.validate();
  return p;
}

namespace {

void require_range(const Tensor& x, const InputRange& range) {
  if (range.lo.size() != x.shape().c || range.hi.size() != x.shape().c) {
    throw DimensionError("input range does not cover every channel of " + to_string(x.shape()));
  }
}

}  // namespace

Tensor perturb_white_noise(const Tensor& x, double delta, Rng& rng, const InputRange& range) {
  if (delta < 0.0) throw ParameterError("white-noise level must be non-negative");
  if (delta == 0.0) return x;
  if (range.clamp) require_range(x, range);
  Tensor out = x;
  const Shape& s = x.shape();
  for (std::size_t i = 0; i < out.size(); ++i) {
    double v = out[i] + delta * rng.normal();
    if (range.clamp) {
      const std::size_t c = (i / s.plane()) % s.c;
      v = std::clamp(v, range.lo[c], range.hi[c]);
    }
    out[i] = v;
  }
  return out;
}

Tensor perturb_salt_pepper(const Tensor& x, double gamma, Rng& rng, const InputRange& range) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ParameterError("salt-and-pepper level must lie in [0,1]");
  if (gamma == 0.0) return x;
  require_range(x, range);
  Tensor out = x;
  const Shape& s = x.shape();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (rng.uniform() < gamma) {
      const std::size_t c = (i / s.plane()) % s.c;
      out[i] = rng.bernoulli(0.5) ? range.hi[c] : range.lo[c];
    }
  }
  return out;
}

Tensor apply_perturbation(const Tensor& x, const EvalPerturbation& p, Rng& rng,
                          const InputRange& range) {
  p.validate();
  switch (p.kind) {
    case PerturbKind::kNone: return x;
    case PerturbKind::kWhite: return perturb_white_noise(x, p.level, rng, range);
    case PerturbKind::kSaltPepper: return perturb_salt_pepper(x, p.level, rng, range);
  }
  return x;
}

std::size_t argmax(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < v.size(); ++k)
    if (v[k] > v[best]) best = k;
  return best;
}

double evaluate_accuracy(const Network& net, const Dataset& data, const EvalPerturbation& perturb,
                         std::uint64_t noise_seed) {
  if (data.size() == 0) throw ParameterError("cannot evaluate on an empty dataset");
  if (data.task != TaskKind::kSingleLabel) throw ParameterError("accuracy needs a single-label dataset");
  Rng rng(noise_seed);
  const Tensor x = apply_perturbation(data.inputs, perturb, rng, data.meta.range);
  const Tensor logits = chunked_forward(net, x);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) correct += argmax(logits.sample(i)) == data.labels[i];
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

double average_precision(std::span<const double> scores, std::span<const std::uint8_t> positives) {
  if (scores.size() != positives.size()) throw DimensionError("score/label length mismatch");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (!positives[order[rank]]) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(rank + 1);
  }
  if (hits == 0) return std::numeric_limits<double>::quiet_NaN();
  return sum / static_cast<double>(hits);
}

MapResult evaluate_map(const Network& net, const Dataset& data, std::ostream* warnings) {
  if (data.size() == 0) throw ParameterError("cannot evaluate on an empty dataset");
  if (data.task != TaskKind::kMultiLabel) throw ParameterError("mAP needs a multilabel dataset");
  const Tensor logits = chunked_forward(net, data.inputs);
  const std::size_t k = data.meta.num_classes;
  MapResult res;
  double sum = 0.0;
  std::size_t used = 0;
  std::vector<double> scores(data.size());
  std::vector<std::uint8_t> pos(data.size());
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      scores[i] = sigmoid(logits.at(i, c));
      pos[i] = data.multi[i][c];
    }
    const double ap = average_precision(scores, pos);
    res.ap.push_back(ap);
    if (std::isnan(ap)) {
      res.excluded.push_back(c);
      if (warnings) *warnings << "warning: class " << c << " has no positives; excluded from mAP\n";
      continue;
    }
    sum += ap;
    ++used;
  }
  res.map = used ? sum / static_cast<double>(used) : std::numeric_limits<double>::quiet_NaN();
  return res;
}

Dataset subsample_dataset(const Dataset& data, double keep_fraction, Rng& rng) {
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
    throw ParameterError("keep fraction must lie in (0,1]");
  }
  std::vector<std::vector<std::size_t>> pools;
  if (data.task == TaskKind::kSingleLabel) {
    pools.resize(data.meta.num_classes);
    for (std::size_t i = 0; i < data.size(); ++i) pools[data.labels[i]].push_back(i);
  } else {
    pools.emplace_back(data.size());
    std::iota(pools[0].begin(), pools[0].end(), std::size_t{0});
  }
  std::vector<std::size_t> kept;
  for (std::size_t c = 0; c < pools.size(); ++c) {
    auto& pool = pools[c];
    if (pool.empty()) continue;
    const auto keep = static_cast<std::size_t>(std::round(keep_fraction * static_cast<double>(pool.size())));
    if (keep == 0) {
      throw ParameterError("keep fraction " + std::to_string(keep_fraction) + " empties class " +
                           std::to_string(c));
    }
    for (std::size_t i = 0; i < keep; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
      std::swap(pool[i], pool[j]);
      kept.push_back(pool[i]);
    }
  }
  std::sort(kept.begin(), kept.end());
  return data.subset(kept);
}

DecisionGrid decision_boundary_grid(const Network& net, const GridBounds& bounds,
                                    std::size_t resolution) {
  if (net.input != Shape{1, 2, 1, 1}) throw ParameterError("decision grid needs a 2-D input model");
  if (resolution < 2) throw ParameterError("grid resolution must be at least 2");
  const std::size_t n = resolution * resolution;
  auto coord = [&](double lo, double hi, std::size_t i) {
    if (i == resolution - 1) return hi;
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(resolution - 1);
  };
  Tensor pts(Shape{n, 2, 1, 1});
  for (std::size_t iy = 0; iy < resolution; ++iy) {
    for (std::size_t ix = 0; ix < resolution; ++ix) {
      const std::size_t r = iy * resolution + ix;
      pts.at(r, 0) = coord(bounds.x_min, bounds.x_max, ix);
      pts.at(r, 1) = coord(bounds.y_min, bounds.y_max, iy);
    }
  }
  const Tensor logits = chunked_forward(net, pts);
  DecisionGrid grid{resolution, net.num_classes, {}};
  grid.rows.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<double> row{pts.at(r, 0), pts.at(r, 1)};
    const auto p = softmax_row(logits.sample(r));
    row.insert(row.end(), p.begin(), p.end());
    grid.rows.push_back(std::move(row));
  }
  return grid;
}

void write_grid_csv(const DecisionGrid& grid, std::ostream& os) {
  os << "x,y";
  for (std::size_t k = 0; k < grid.num_classes; ++k) os << ",p_" << k;
  os << '\n';
  os << std::setprecision(17);
  for (const auto& row : grid.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) os << (j ? "," : "") << row[j];
    os << '\n';
  }
}

}  // namespace shufflemix

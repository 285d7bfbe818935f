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

#include "shufflemix/data.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "shufflemix/errors.hpp"

namespace shufflemix {

void Dataset::validate() const {
  const std::size_t n = size();
  const std::size_t k = meta.num_classes;
  if (task == TaskKind::kSingleLabel) {
    if (labels.size() != n) throw ParameterError("label count does not match sample count");
    for (auto l : labels) {
      if (l >= k) throw ParameterError("class index " + std::to_string(l) + " >= K");
    }
  } else {
    if (multi.size() != n) throw ParameterError("label count does not match sample count");
    for (const auto& v : multi) {
      if (v.size() != k) throw ParameterError("multilabel vector length differs from K");
    }
  }
}

SoftLabel Dataset::soft_label(std::size_t i) const {
  if (task == TaskKind::kSingleLabel) return SoftLabel::one_hot(labels[i], meta.num_classes);
  SoftLabel y{std::vector<double>(meta.num_classes), LabelMode::kMultilabel};
  for (std::size_t k = 0; k < meta.num_classes; ++k) y.values[k] = multi[i][k];
  return y;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.inputs = gather_rows(inputs, indices);
  out.task = task;
  out.meta = meta;
  out.meta.class_counts.assign(meta.num_classes, 0);
  for (auto i : indices) {
    if (task == TaskKind::kSingleLabel) {
      out.labels.push_back(labels[i]);
      ++out.meta.class_counts[labels[i]];
    } else {
      out.multi.push_back(multi[i]);
      for (std::size_t k = 0; k < meta.num_classes; ++k) out.meta.class_counts[k] += multi[i][k];
    }
  }
  return out;
}

InputRange observed_range(const Tensor& inputs) {
  const Shape& s = inputs.shape();
  InputRange r{std::vector<double>(s.c, INFINITY), std::vector<double>(s.c, -INFINITY), false};
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < s.c; ++c) {
      for (double v : inputs.channel(n, c)) {
        r.lo[c] = std::min(r.lo[c], v);
        r.hi[c] = std::max(r.hi[c], v);
      }
    }
  }
  return r;
}

namespace {

Dataset make_rings(std::size_t n, double noise_std, Rng& rng, std::span<const double> radii,
                   const std::string& name) {
  const std::size_t k = radii.size();
  if (n < 2 * k) {
    throw ParameterError(name + " needs at least " + std::to_string(2 * k) + " samples");
  }
  if (noise_std < 0.0) throw ParameterError("noise_std must be non-negative");
  // Earlier rings absorb the remainder, so counts differ by at most one.
  std::vector<std::size_t> counts(k, n / k);
  for (std::size_t c = 0; c < n % k; ++c) ++counts[c];

  std::vector<double> xs, ys;
  std::vector<std::size_t> labels;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < counts[c]; ++i) {
      const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(counts[c]);
      xs.push_back(radii[c] * std::cos(t));
      ys.push_back(radii[c] * std::sin(t));
      labels.push_back(c);
    }
  }
  if (noise_std > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      xs[i] += noise_std * rng.normal();
      ys[i] += noise_std * rng.normal();
    }
  }
  const auto order = pairing_permutation(n, rng);

  Dataset ds;
  ds.inputs = Tensor(Shape{n, 2, 1, 1});
  ds.task = TaskKind::kSingleLabel;
  for (std::size_t i = 0; i < n; ++i) {
    ds.inputs.at(i, 0) = xs[order[i]];
    ds.inputs.at(i, 1) = ys[order[i]];
    ds.labels.push_back(labels[order[i]]);
  }
  ds.meta.name = name;
  ds.meta.num_classes = k;
  ds.meta.class_counts = counts;
  ds.meta.range = observed_range(ds.inputs);
  return ds;
}

}  // namespace

Dataset make_circles(std::size_t n, double noise_std, Rng& rng) {
  const double radii[] = {1.0, kCirclesInnerRadius};
  return make_rings(n, noise_std, rng, radii, "circles");
}

Dataset make_three_rings(std::size_t n, double noise_std, Rng& rng) {
  return make_rings(n, noise_std, rng, kRingRadii, "rings3");
}

Dataset make_multilabel_synthetic(std::size_t n, std::size_t num_classes, Rng& rng,
                                  const MultilabelRecipe& recipe) {
  if (num_classes < 2) throw ParameterError("multilabel synthetic data needs K >= 2");
  if (n == 0 || recipe.dim == 0) throw ParameterError("multilabel synthetic data needs n, dim >= 1");
  const std::size_t d = recipe.dim;
  std::vector<double> protos(num_classes * d);
  for (double& v : protos) v = recipe.prototype_scale * rng.normal();

  Dataset ds;
  ds.inputs = Tensor(Shape{n, d, 1, 1});
  ds.task = TaskKind::kMultiLabel;
  ds.meta.name = "multilabel";
  ds.meta.num_classes = num_classes;
  ds.meta.class_counts.assign(num_classes, 0);
  const std::size_t max_active = std::min<std::size_t>(3, num_classes);
  std::vector<std::size_t> classes(num_classes);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t active = 1 + static_cast<std::size_t>(rng.below(max_active));
    for (std::size_t c = 0; c < num_classes; ++c) classes[c] = c;
    std::vector<std::uint8_t> y(num_classes, 0);
    auto x = ds.inputs.sample(i);
    for (std::size_t a = 0; a < active; ++a) {
      const std::size_t j = a + static_cast<std::size_t>(rng.below(num_classes - a));
      std::swap(classes[a], classes[j]);
      const std::size_t cls = classes[a];
      y[cls] = 1;
      ++ds.meta.class_counts[cls];
      for (std::size_t t = 0; t < d; ++t) x[t] += protos[cls * d + t];
    }
    for (std::size_t t = 0; t < d; ++t) x[t] += recipe.noise_std * rng.normal();
    ds.multi.push_back(std::move(y));
  }
  ds.meta.range = observed_range(ds.inputs);
  return ds;
}

std::vector<CifarRecord> read_cifar10_batch(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open CIFAR-10 batch " + path + " (byte offset 0)");
  std::vector<char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  if (bytes.empty()) throw IoError("empty CIFAR-10 batch " + path + " at byte offset 0");
  if (bytes.size() % kCifarRecordBytes != 0) {
    const std::size_t complete = bytes.size() / kCifarRecordBytes * kCifarRecordBytes;
    throw IoError("truncated CIFAR-10 batch " + path + ": partial record at byte offset " +
                  std::to_string(complete));
  }
  std::vector<CifarRecord> records;
  records.reserve(bytes.size() / kCifarRecordBytes);
  for (std::size_t off = 0; off < bytes.size(); off += kCifarRecordBytes) {
    CifarRecord r;
    r.label = static_cast<std::uint8_t>(bytes[off]);
    if (r.label > 9) {
      throw FormatError("label byte " + std::to_string(r.label) + " > 9 in " + path +
                        " at byte offset " + std::to_string(off));
    }
    r.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(off + 1),
                    bytes.begin() + static_cast<std::ptrdiff_t>(off + kCifarRecordBytes));
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<CifarRecord> read_cifar10_train(const std::string& path) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(path)) return read_cifar10_batch(path);
  std::vector<CifarRecord> all;
  for (int b = 1; b <= 5; ++b) {
    const fs::path file = fs::path(path) / ("data_batch_" + std::to_string(b) + ".bin");
    if (!fs::exists(file)) continue;
    auto part = read_cifar10_batch(file.string());
    all.insert(all.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  if (all.empty()) throw IoError("no data_batch_*.bin files under " + path + " (byte offset 0)");
  return all;
}

std::vector<CifarRecord> read_cifar10_test(const std::string& path) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(path)) return read_cifar10_batch(path);
  return read_cifar10_batch((fs::path(path) / "test_batch.bin").string());
}

std::vector<CifarRecord> select_per_class(const std::vector<CifarRecord>& records,
                                          std::size_t n_per_class, Rng& rng) {
  std::vector<std::vector<std::size_t>> by_class(10);
  for (std::size_t i = 0; i < records.size(); ++i) by_class[records[i].label].push_back(i);
  std::vector<std::size_t> chosen;
  for (std::size_t c = 0; c < 10; ++c) {
    auto& pool = by_class[c];
    if (pool.size() < n_per_class) {
      throw ParameterError("class " + std::to_string(c) + " has only " + std::to_string(pool.size()) +
                           " records, " + std::to_string(n_per_class) + " requested");
    }
    for (std::size_t i = 0; i < n_per_class; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
      std::swap(pool[i], pool[j]);
      chosen.push_back(pool[i]);
    }
  }
  const auto order = pairing_permutation(chosen.size(), rng);
  std::vector<CifarRecord> out;
  out.reserve(chosen.size());
  for (auto o : order) out.push_back(records[chosen[o]]);
  return out;
}

void cifar_channel_stats(const std::vector<CifarRecord>& records, std::vector<double>& mean,
                         std::vector<double>& stdev) {
  if (records.empty()) throw ParameterError("cannot compute statistics of an empty subset");
  constexpr std::size_t plane = kCifarSide * kCifarSide;
  mean.assign(3, 0.0);
  stdev.assign(3, 0.0);
  const double count = static_cast<double>(records.size() * plane);
  for (std::size_t c = 0; c < 3; ++c) {
    long double sum = 0.0L;
    for (const auto& r : records)
      for (std::size_t i = 0; i < plane; ++i) sum += r.pixels[c * plane + i];
    mean[c] = static_cast<double>(sum / count);
    long double sq = 0.0L;
    for (const auto& r : records) {
      for (std::size_t i = 0; i < plane; ++i) {
        const long double d = r.pixels[c * plane + i] - static_cast<long double>(mean[c]);
        sq += d * d;
      }
    }
    stdev[c] = static_cast<double>(std::sqrt(sq / count));
    if (stdev[c] == 0.0) stdev[c] = 1.0;
  }
}

Dataset cifar_to_dataset(const std::vector<CifarRecord>& records, const std::vector<double>& mean,
                         const std::vector<double>& stdev, const std::string& name) {
  constexpr std::size_t plane = kCifarSide * kCifarSide;
  Dataset ds;
  ds.inputs = Tensor(Shape{records.size(), 3, kCifarSide, kCifarSide});
  ds.task = TaskKind::kSingleLabel;
  ds.meta.name = name;
  ds.meta.num_classes = 10;
  ds.meta.class_counts.assign(10, 0);
  ds.meta.norm_mean = mean;
  ds.meta.norm_std = stdev;
  for (std::size_t n = 0; n < records.size(); ++n) {
    auto x = ds.inputs.sample(n);
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t i = 0; i < plane; ++i) {
        x[c * plane + i] = (records[n].pixels[c * plane + i] - mean[c]) / stdev[c];
      }
    }
    ds.labels.push_back(records[n].label);
    ++ds.meta.class_counts[records[n].label];
  }
  ds.meta.range.clamp = true;
  for (std::size_t c = 0; c < 3; ++c) {
    ds.meta.range.lo.push_back((0.0 - mean[c]) / stdev[c]);
    ds.meta.range.hi.push_back((255.0 - mean[c]) / stdev[c]);
  }
  return ds;
}

Dataset load_cifar10_subset(const std::string& path, std::size_t n_per_class, Rng& rng) {
  if (n_per_class == 0) throw ParameterError("n_per_class must be positive");
  const auto picked = select_per_class(read_cifar10_train(path), n_per_class, rng);
  std::vector<double> mean, stdev;
  cifar_channel_stats(picked, mean, stdev);
  return cifar_to_dataset(picked, mean, stdev, "cifar10");
}

std::vector<std::uint8_t> denormalize_cifar(const Dataset& ds, std::size_t index) {
  if (ds.meta.norm_mean.size() != ds.inputs.shape().c) {
    throw ParameterError("dataset carries no normalization constants");
  }
  const std::size_t plane = ds.inputs.shape().plane();
  auto x = ds.inputs.sample(index);
  std::vector<std::uint8_t> bytes(x.size());
  for (std::size_t c = 0; c < ds.inputs.shape().c; ++c) {
    for (std::size_t i = 0; i < plane; ++i) {
      const double v = std::round(x[c * plane + i] * ds.meta.norm_std[c] + ds.meta.norm_mean[c]);
      bytes[c * plane + i] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
    }
  }
  return bytes;
}

}  // namespace shufflemix

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

#include <cstdint>
#include <string>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "shufflemix/augment.hpp"
#include "shufflemix/data.hpp"
#include "shufflemix/errors.hpp"
#include "shufflemix/experiment.hpp"
#include "shufflemix/sampling.hpp"
#include "shufflemix/train.hpp"

namespace py = pybind11;
using namespace shufflemix;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Accepts (N, C) or (N, C, H, W) arrays.
Tensor to_tensor(const Array& a) {
  const auto info = a.request();
  Shape s;
  if (info.ndim == 2) {
    s = Shape{static_cast<std::size_t>(info.shape[0]), static_cast<std::size_t>(info.shape[1]), 1, 1};
  } else if (info.ndim == 4) {
    s = Shape{static_cast<std::size_t>(info.shape[0]), static_cast<std::size_t>(info.shape[1]),
              static_cast<std::size_t>(info.shape[2]), static_cast<std::size_t>(info.shape[3])};
  } else {
    throw DimensionError("expected a 2-D (N, C) or 4-D (N, C, H, W) array");
  }
  const auto* p = static_cast<const double*>(info.ptr);
  return Tensor(s, std::vector<double>(p, p + a.size()));
}

Array to_array(const Tensor& t, py::ssize_t ndim) {
  const Shape& s = t.shape();
  std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(s.n), static_cast<py::ssize_t>(s.c)};
  if (ndim == 4) {
    shape.push_back(static_cast<py::ssize_t>(s.h));
    shape.push_back(static_cast<py::ssize_t>(s.w));
  }
  Array out(shape);
  std::copy(t.data().begin(), t.data().end(), out.mutable_data());
  return out;
}

ChannelMask mask_from(const std::vector<int>& bits) {
  std::vector<std::uint8_t> b;
  b.reserve(bits.size());
  for (int v : bits) {
    if (v != 0 && v != 1) throw ParameterError("mask entries must be 0 or 1");
    b.push_back(static_cast<std::uint8_t>(v));
  }
  return ChannelMask::from_bits(std::move(b));
}

SoftLabel label_from(const std::vector<double>& v, bool multilabel) {
  return SoftLabel{v, multilabel ? LabelMode::kMultilabel : LabelMode::kSimplex};
}

py::tuple dataset_tuple(const Dataset& d) {
  const py::ssize_t ndim = d.inputs.shape().h == 1 && d.inputs.shape().w == 1 ? 2 : 4;
  if (d.task == TaskKind::kSingleLabel) return py::make_tuple(to_array(d.inputs, ndim), d.labels);
  py::array_t<std::uint8_t> y({static_cast<py::ssize_t>(d.size()), static_cast<py::ssize_t>(d.meta.num_classes)});
  auto* p = y.mutable_data();
  for (const auto& row : d.multi) p = std::copy(row.begin(), row.end(), p);
  return py::make_tuple(to_array(d.inputs, ndim), y);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Channel-shuffle mixing, injection networks and the training loop.";

  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<EvaluationError>(m, "EvaluationError", PyExc_ArithmeticError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);

  py::class_<Rng>(m, "Rng")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("next_u64", &Rng::next_u64)
      .def("uniform", py::overload_cast<>(&Rng::uniform))
      .def("normal", &Rng::normal)
      .def("below", &Rng::below, py::arg("n"))
      .def("split", &Rng::split);

  m.def("sample_beta", &sample_beta, py::arg("alpha"), py::arg("rng"));
  m.def("mask_cardinality", &mask_cardinality, py::arg("channels"), py::arg("ratio"));
  m.def(
      "sample_channel_mask",
      [](std::size_t channels, double ratio, Rng& rng) {
        const ChannelMask mask = sample_channel_mask(channels, ratio, rng);
        return std::vector<int>(mask.bits.begin(), mask.bits.end());
      },
      py::arg("channels"), py::arg("ratio"), py::arg("rng"));
  m.def("pairing_permutation", &pairing_permutation, py::arg("n"), py::arg("rng"));
  m.def(
      "sample_layer_index", [](const std::vector<int>& eligible, Rng& rng) { return sample_layer_index(eligible, rng); },
      py::arg("eligible"), py::arg("rng"));

  m.def(
      "input_mixup",
      [](const Array& a, const Array& b, double lam) { return to_array(input_mixup(to_tensor(a), to_tensor(b), lam), a.ndim()); },
      py::arg("x_a"), py::arg("x_b"), py::arg("lam"));
  m.def(
      "manifold_mixup",
      [](const Array& a, const Array& b, double lam) {
        return to_array(manifold_mixup(to_tensor(a), to_tensor(b), lam), a.ndim());
      },
      py::arg("h_a"), py::arg("h_b"), py::arg("lam"));
  m.def(
      "hard_shufflemix",
      [](const Array& a, const Array& b, const std::vector<int>& mask) {
        return to_array(hard_shufflemix(to_tensor(a), to_tensor(b), mask_from(mask)), a.ndim());
      },
      py::arg("h_a"), py::arg("h_b"), py::arg("mask"));
  m.def(
      "soft_shufflemix",
      [](const Array& a, const Array& b, const std::vector<int>& mask, double lam) {
        return to_array(soft_shufflemix(to_tensor(a), to_tensor(b), mask_from(mask), lam), a.ndim());
      },
      py::arg("h_a"), py::arg("h_b"), py::arg("mask"), py::arg("lam"));
  m.def(
      "nfm_perturb",
      [](const Array& h, double delta_add, double delta_mult, std::uint64_t seed) {
        Rng rng(seed);
        return to_array(nfm_perturb(to_tensor(h), delta_add, delta_mult, rng), h.ndim());
      },
      py::arg("h"), py::arg("delta_add"), py::arg("delta_mult"), py::arg("seed"));

  m.def("label_coefficients", &label_coefficients, py::arg("ratio"), py::arg("lam"));
  m.def(
      "mix_labels",
      [](const std::vector<double>& ya, const std::vector<double>& yb, double ratio, double lam, bool multilabel) {
        return mix_labels(label_from(ya, multilabel), label_from(yb, multilabel), ratio, lam).values;
      },
      py::arg("y_a"), py::arg("y_b"), py::arg("ratio"), py::arg("lam"), py::arg("multilabel") = false);
  m.def(
      "threshold_labels",
      [](const std::vector<double>& y, double m_threshold) {
        return threshold_labels(label_from(y, true), m_threshold).values;
      },
      py::arg("y"), py::arg("m"));

  m.def(
      "average_precision",
      [](const std::vector<double>& scores, const std::vector<int>& positives) {
        std::vector<std::uint8_t> p(positives.begin(), positives.end());
        return average_precision(scores, p);
      },
      py::arg("scores"), py::arg("positives"));

  m.def(
      "make_circles", [](std::size_t n, double noise, std::uint64_t seed) {
        Rng rng(seed);
        return dataset_tuple(make_circles(n, noise, rng));
      },
      py::arg("n"), py::arg("noise_std"), py::arg("seed"));
  m.def(
      "make_three_rings", [](std::size_t n, double noise, std::uint64_t seed) {
        Rng rng(seed);
        return dataset_tuple(make_three_rings(n, noise, rng));
      },
      py::arg("n"), py::arg("noise_std"), py::arg("seed"));
  m.def(
      "make_multilabel_synthetic", [](std::size_t n, std::size_t k, std::uint64_t seed) {
        Rng rng(seed);
        return dataset_tuple(make_multilabel_synthetic(n, k, rng));
      },
      py::arg("n"), py::arg("num_classes"), py::arg("seed"));

  m.def(
      "_run_experiment_json",
      [](const std::string& manifest_json) {
        const ExperimentManifest manifest = ExperimentManifest::from_json(nlohmann::json::parse(manifest_json));
        std::ostringstream log;
        ExperimentOutcome outcome;
        {
          py::gil_scoped_release release;
          outcome = run_experiment_outcome(manifest, log);
        }
        return py::make_tuple(outcome.record.to_json().dump(), log.str());
      },
      py::arg("manifest_json"));
  m.def(
      "_resolved_manifest_json",
      [](const std::string& manifest_json) {
        ExperimentManifest manifest = ExperimentManifest::from_json(nlohmann::json::parse(manifest_json));
        manifest.resolve_defaults();
        return manifest.to_json().dump();
      },
      py::arg("manifest_json"));
}

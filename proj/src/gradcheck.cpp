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

#include "shufflemix/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "shufflemix/errors.hpp"

namespace shufflemix {

std::vector<double> fd_gradient_oracle(const ScalarObjective& loss_fn,
                                       std::span<const double> point, double step) {
  if (!(step > 0.0)) throw ParameterError("finite-difference step must be positive");
  std::vector<double> p(point.begin(), point.end());
  std::vector<double> grad(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double orig = p[i];
    p[i] = orig + step;
    const double plus = loss_fn(p);
    p[i] = orig - step;
    const double minus = loss_fn(p);
    p[i] = orig;
    if (!std::isfinite(plus) || !std::isfinite(minus)) {
      throw EvaluationError("non-finite loss while perturbing coordinate " + std::to_string(i));
    }
    grad[i] = (plus - minus) / (2.0 * step);
  }
  return grad;
}

double max_relative_error(std::span<const double> a, std::span<const double> b, double floor) {
  double worst = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double denom = std::max({std::abs(a[i]), std::abs(b[i]), floor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
  }
  return worst;
}

}  // namespace shufflemix

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

#ifndef SHUFFLEMIX_GRADCHECK_HPP
#define SHUFFLEMIX_GRADCHECK_HPP

#include <functional>
#include <span>
#include <vector>

namespace shufflemix {

using ScalarObjective = std::function<double(std::span<const double>)>;

/// Central-difference gradient estimate (f(p + h e_i) - f(p - h e_i)) / 2h per coordinate.
/// Throws ParameterError for step <= 0 and EvaluationError when f is non-finite.
std::vector<double> fd_gradient_oracle(const ScalarObjective& loss_fn,
                                       std::span<const double> point, double step);

/// max_i |a_i - b_i| / max(|a_i|, |b_i|, floor). The floor keeps coordinates whose true
/// gradient is ~0 from reporting finite-difference round-off as relative error.
double max_relative_error(std::span<const double> a, std::span<const double> b,
                          double floor = 1e-6);

}  // namespace shufflemix

#endif  // SHUFFLEMIX_GRADCHECK_HPP

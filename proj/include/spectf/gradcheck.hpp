/*
 * Copyright 2026 The SpecTf Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SPECTF_GRADCHECK_HPP_
#define SPECTF_GRADCHECK_HPP_

#include <cstddef>
#include <functional>
#include <span>

#include "spectf/tensor.hpp"

namespace spectf {

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t worst_tensor = 0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

// Compares `analytic[t]` against central differences of `loss` taken by
// perturbing every coordinate of `*params[t]` in place by +-h. The relative
// error of a coordinate is |analytic - numeric| / (|analytic| + 1e-8).
// Parameters are restored bit-exactly before returning.
GradCheckResult finite_difference_check(const std::function<double()>& loss,
                                        std::span<Tensor* const> params,
                                        std::span<const Tensor> analytic,
                                        double h = 1e-5);

}  // namespace spectf

#endif  // SPECTF_GRADCHECK_HPP_

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

#include "spectf/gradcheck.hpp"

#include <cmath>

#include "spectf/error.hpp"

namespace spectf {

GradCheckResult finite_difference_check(const std::function<double()>& loss,
                                        std::span<Tensor* const> params,
                                        std::span<const Tensor> analytic, double h) {
  if (params.size() != analytic.size()) {
    throw ContractError("finite_difference_check: parameter/gradient count mismatch");
  }
  GradCheckResult result;
  for (std::size_t t = 0; t < params.size(); ++t) {
    Tensor& p = *params[t];
    if (analytic[t].size() != p.size()) {
      throw DimensionError("finite_difference_check: gradient " +
                           shape_to_string(analytic[t].shape()) + " vs parameter " +
                           shape_to_string(p.shape()));
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double original = p[i];
      p[i] = original + h;
      const double up = loss();
      p[i] = original - h;
      const double down = loss();
      p[i] = original;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic[t][i];
      const double err = std::abs(a - numeric) / (std::abs(a) + 1e-8);
      if (err > result.max_relative_error || (t == 0 && i == 0)) {
        result = {err, t, i, a, numeric};
      }
    }
  }
  return result;
}

}  // namespace spectf

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

#include "spectf/baseline.hpp"

#include <cmath>
#include <string>

#include "spectf/error.hpp"

namespace spectf {

void BaselineThresholds::validate() const {
  for (double t : {t450, t1250, t1650, t1380}) {
    if (!(t > 0.0 && t < 1.0)) throw ConfigError("baseline thresholds must lie in (0, 1)");
  }
}

std::size_t nearest_band(const BandGrid& grid, double target_nm) {
  if (grid.empty()) throw ContractError("nearest_band on an empty grid");
  const std::size_t n = grid.size();
  const double low_spacing = n > 1 ? grid[1] - grid[0] : 0.0;
  const double high_spacing = n > 1 ? grid[n - 1] - grid[n - 2] : 0.0;
  if (target_nm < grid.front() - low_spacing || target_nm > grid.back() + high_spacing) {
    throw ContractError("target " + std::to_string(target_nm) + " nm is outside the grid span [" +
                        std::to_string(grid.front()) + ", " + std::to_string(grid.back()) + "] nm");
  }
  std::size_t best = 0;
  double best_dist = std::abs(grid[0] - target_nm);
  for (std::size_t i = 1; i < n; ++i) {
    const double dist = std::abs(grid[i] - target_nm);
    if (dist < best_dist) {
      best = i;
      best_dist = dist;
    }
  }
  return best;
}

BaselineClassifier::BaselineClassifier(const BandGrid& grid, BaselineThresholds thresholds)
    : thresholds_(thresholds),
      b450_(nearest_band(grid, 450.0)),
      b1250_(nearest_band(grid, 1250.0)),
      b1650_(nearest_band(grid, 1650.0)),
      b1380_(nearest_band(grid, 1380.0)),
      bands_(grid.size()) {
  thresholds_.validate();
}

Label BaselineClassifier::classify(std::span<const double> r) const {
  if (r.size() != bands_) {
    throw ContractError("baseline: spectrum has " + std::to_string(r.size()) + " values for a " +
                        std::to_string(bands_) + "-band grid");
  }
  const bool opaque =
      r[b450_] > thresholds_.t450 && r[b1250_] > thresholds_.t1250 && r[b1650_] > thresholds_.t1650;
  const bool cirrus = r[b1380_] > thresholds_.t1380;
  return opaque || cirrus ? Label::kCloud : Label::kClear;
}

Label baseline_classify(std::span<const double> reflectance, const BandGrid& grid,
                        const BaselineThresholds& thresholds) {
  return BaselineClassifier(grid, thresholds).classify(reflectance);
}

}  // namespace spectf

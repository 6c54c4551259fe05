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

#ifndef SPECTF_BASELINE_HPP_
#define SPECTF_BASELINE_HPP_

// Band-threshold cloud screen:
//   cloud iff (b450 > t450 and b1250 > t1250 and b1650 > t1650) or b1380 > t1380
// with each bXXX read from the nearest band. Inequalities are strict.

#include <cstddef>
#include <span>

#include "spectf/dataset.hpp"
#include "spectf/spectra.hpp"

namespace spectf {

struct BaselineThresholds {
  double t450 = 0.28;
  double t1250 = 0.46;
  double t1650 = 0.22;
  double t1380 = 0.1;

  void validate() const;
};

// Index of the band center closest to `target_nm`, lower index on ties.
// Throws ContractError when the target lies more than one band spacing
// beyond either end of the grid.
std::size_t nearest_band(const BandGrid& grid, double target_nm);

// Precomputed band indices for one grid.
class BaselineClassifier {
 public:
  explicit BaselineClassifier(const BandGrid& grid, BaselineThresholds thresholds = {});

  Label classify(std::span<const double> reflectance) const;
  const BaselineThresholds& thresholds() const { return thresholds_; }

 private:
  BaselineThresholds thresholds_;
  std::size_t b450_, b1250_, b1650_, b1380_;
  std::size_t bands_;
};

Label baseline_classify(std::span<const double> reflectance, const BandGrid& grid,
                        const BaselineThresholds& thresholds = {});

}  // namespace spectf

#endif  // SPECTF_BASELINE_HPP_

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

#ifndef SPECTF_MODEL_COMMON_HPP_
#define SPECTF_MODEL_COMMON_HPP_

#include <optional>
#include <vector>

#include "spectf/spectra.hpp"

namespace spectf {

enum class Mode { kTrain, kInfer };

// Softmax head output in (clear, cloud) order.
struct ClassProbabilities {
  double clear = 0.5;
  double cloud = 0.5;
};

// Input contract a model carries with it: how wavelengths are normalized
// and which bands are dropped before the spectrum reaches the network.
struct Preprocessing {
  double wavelength_center_nm = kWavelengthCenterNm;
  double wavelength_scale_nm = kWavelengthScaleNm;
  std::vector<Window> exclusion_windows = emit_exclusion_windows();
  // Band-center span seen during training, if known.
  std::optional<Window> training_span;
};

}  // namespace spectf

#endif  // SPECTF_MODEL_COMMON_HPP_

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

#ifndef SPECTF_INFERENCE_HPP_
#define SPECTF_INFERENCE_HPP_

// Scene- and table-level inference for either architecture. A model's
// preprocessing record decides which bands reach the network.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>

#include "spectf/ann.hpp"
#include "spectf/baseline.hpp"
#include "spectf/cube_io.hpp"
#include "spectf/dataset.hpp"
#include "spectf/metrics.hpp"
#include "spectf/spectf_model.hpp"

namespace spectf {

class LoadedModel {
 public:
  LoadedModel(SpecTfModel model, std::uint32_t checksum = 0);
  LoadedModel(AnnModel model, std::uint32_t checksum = 0);

  // Dispatches on the manifest architecture id.
  static LoadedModel load(const std::filesystem::path& path);

  const std::string& architecture() const;
  const Preprocessing& preprocessing() const;
  std::optional<double> decision_threshold() const;
  std::size_t parameter_count() const;
  std::string checksum() const;  // payload CRC-32, 8 hex digits
  std::string config_json() const;

  const SpecTfModel* spectf() const { return std::get_if<SpecTfModel>(&model_); }
  const AnnModel* ann() const { return std::get_if<AnnModel>(&model_); }

  // `reflectance` must already be on the masked grid `wavelengths_nm`.
  ClassProbabilities predict(std::span<const double> reflectance,
                             std::span<const double> wavelengths_nm) const;

 private:
  std::variant<SpecTfModel, AnnModel> model_;
  std::uint32_t checksum_;
};

// Applies the model's exclusion windows to a dataset and scores every record.
ScoredSet score_table(const LoadedModel& model, const LabeledDataset& dataset,
                      std::size_t threads = 1);

struct ScenePrediction {
  ProbabilityMap probability;
  MaskRaster mask;
  std::size_t no_data_pixels = 0;
};

// Radiance cubes are converted to TOA reflectance first (their geometry
// record is required). Pixels with any non-finite band get probability NaN
// and mask value 255. The result does not depend on `threads`.
ScenePrediction predict_scene(const LoadedModel& model, const SpectralCube& cube,
                              double threshold, std::size_t threads = 1);

// Per-pixel threshold predicate; non-finite pixels are no-data.
MaskRaster baseline_scene(const SpectralCube& cube, const BaselineThresholds& thresholds = {});

// Pairs a probability raster with a label raster, skipping no-data on either
// side.
ScoredSet pair_with_labels(const ProbabilityMap& probability, const MaskRaster& labels);

}  // namespace spectf

#endif  // SPECTF_INFERENCE_HPP_

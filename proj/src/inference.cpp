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

#include "spectf/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spectf/error.hpp"
#include "spectf/model_file.hpp"
#include "spectf/parallel.hpp"
#include "spectf/training.hpp"

namespace spectf {
namespace {

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

LoadedModel::LoadedModel(SpecTfModel model, std::uint32_t checksum)
    : model_(std::move(model)), checksum_(checksum) {}
LoadedModel::LoadedModel(AnnModel model, std::uint32_t checksum)
    : model_(std::move(model)), checksum_(checksum) {}

LoadedModel LoadedModel::load(const std::filesystem::path& path) {
  const ModelFileContents contents = read_model_file(path);
  if (contents.architecture == "spectf") {
    return LoadedModel(spectf_from_contents(contents), contents.payload_crc32);
  }
  if (contents.architecture == "ann") {
    return LoadedModel(ann_from_contents(contents), contents.payload_crc32);
  }
  throw FormatError("unknown model architecture '" + contents.architecture + "'");
}

const std::string& LoadedModel::architecture() const {
  static const std::string kSpecTf = "spectf", kAnn = "ann";
  return spectf() ? kSpecTf : kAnn;
}

const Preprocessing& LoadedModel::preprocessing() const {
  return std::visit([](const auto& m) -> const Preprocessing& { return m.preprocessing(); },
                    model_);
}

std::optional<double> LoadedModel::decision_threshold() const {
  return std::visit([](const auto& m) { return m.decision_threshold; }, model_);
}

std::size_t LoadedModel::parameter_count() const {
  return std::visit([](const auto& m) { return m.parameters().scalar_count(); }, model_);
}

std::string LoadedModel::checksum() const { return format_crc32(checksum_); }

std::string LoadedModel::config_json() const {
  if (const auto* m = spectf()) return spectf_config_json(m->config());
  return ann_config_json(ann()->config());
}

ClassProbabilities LoadedModel::predict(std::span<const double> reflectance,
                                        std::span<const double> wavelengths_nm) const {
  if (const auto* m = spectf()) return m->predict(reflectance, wavelengths_nm);
  return ann()->predict(reflectance);
}

ScoredSet score_table(const LoadedModel& model, const LabeledDataset& dataset,
                      std::size_t threads) {
  const LabeledDataset masked = band_mask(dataset, model.preprocessing().exclusion_windows);
  if (const auto* m = model.spectf()) return score_dataset(*m, masked, threads);
  return score_dataset(*model.ann(), masked, threads);
}

ScenePrediction predict_scene(const LoadedModel& model, const SpectralCube& cube,
                              double threshold, std::size_t threads) {
  if (!std::isfinite(threshold)) throw ContractError("decision threshold must be finite");
  SpectralCube rho = cube;
  rho.validate();
  convert_to_reflectance(rho);
  const SpectralCube masked = band_mask(rho, model.preprocessing().exclusion_windows);
  const auto wavelengths = masked.grid.wavelengths();

  ScenePrediction out;
  out.probability = ProbabilityMap{cube.lines, cube.samples,
                                   std::vector<double>(cube.pixels(), 0.0)};
  out.mask = MaskRaster{cube.lines, cube.samples, std::vector<std::uint8_t>(cube.pixels(), 0),
                        threshold, model.checksum()};
  // Each pixel writes only its own slot, so the assembly order is fixed.
  parallel_for(cube.pixels(), threads, [&](std::size_t p) {
    const auto px = masked.pixel(p);
    if (!all_finite(px)) {
      out.probability.values[p] = std::numeric_limits<double>::quiet_NaN();
      out.mask.values[p] = kMaskNoData;
      return;
    }
    const double pc = model.predict(px, wavelengths).cloud;
    out.probability.values[p] = pc;
    out.mask.values[p] = pc >= threshold ? kMaskCloud : kMaskClear;
  });
  out.no_data_pixels = static_cast<std::size_t>(
      std::count(out.mask.values.begin(), out.mask.values.end(), kMaskNoData));
  return out;
}

MaskRaster baseline_scene(const SpectralCube& cube, const BaselineThresholds& thresholds) {
  SpectralCube rho = cube;
  rho.validate();
  convert_to_reflectance(rho);
  const BaselineClassifier classifier(rho.grid, thresholds);
  MaskRaster mask{cube.lines, cube.samples, std::vector<std::uint8_t>(cube.pixels(), 0),
                  std::nullopt, ""};
  for (std::size_t p = 0; p < rho.pixels(); ++p) {
    const auto px = rho.pixel(p);
    if (!all_finite(px)) {
      mask.values[p] = kMaskNoData;
    } else {
      mask.values[p] = classifier.classify(px) == Label::kCloud ? kMaskCloud : kMaskClear;
    }
  }
  return mask;
}

ScoredSet pair_with_labels(const ProbabilityMap& probability, const MaskRaster& labels) {
  if (probability.lines != labels.lines || probability.samples != labels.samples) {
    throw ContractError("probability and label rasters differ in extent");
  }
  ScoredSet set;
  for (std::size_t p = 0; p < labels.values.size(); ++p) {
    const std::uint8_t l = labels.values[p];
    const double s = probability.values[p];
    if (l == kMaskNoData || !std::isfinite(s)) continue;
    set.push_back({s, l == kMaskCloud ? Label::kCloud : Label::kClear});
  }
  return set;
}

}  // namespace spectf

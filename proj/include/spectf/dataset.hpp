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

#ifndef SPECTF_DATASET_HPP_
#define SPECTF_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spectf/spectra.hpp"

namespace spectf {

// Class order is (clear, cloud) everywhere: probability vectors, labels,
// files.
enum class Label : std::uint8_t { kClear = 0, kCloud = 1 };
inline constexpr std::uint8_t kUnlabeled = 255;

std::string_view label_name(Label label);
// Parses "clear" / "cloud"; throws FormatError otherwise.
Label parse_label(std::string_view name);

// One reflectance cube with per-pixel labels (0 clear, 1 cloud,
// 255 unlabeled).
struct LabeledScene {
  std::string id;
  SpectralCube cube;
  std::vector<std::uint8_t> labels;
};

struct DatasetRecord {
  std::string scene_id;
  Label label;
  std::vector<double> values;
};

struct LabeledDataset {
  BandGrid grid;
  std::vector<DatasetRecord> records;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
  std::vector<std::string> scene_ids() const;  // sorted, unique
  std::size_t count(Label label) const;
};

inline constexpr std::size_t kDefaultSamplesPerClass = 10000;

// Uniform sampling without replacement of up to `cap` pixels per class per
// scene. Scene s uses Rng::stream(seed, s.id), so results do not depend on
// scene order. All scenes must share one band grid. Radiance pixels are
// converted to TOA reflectance.
LabeledDataset sample_dataset(const std::vector<LabeledScene>& scenes, std::size_t cap,
                              std::uint64_t seed);

// Scene-disjoint split. round(fraction * scenes) scenes (clamped to
// [1, scenes - 1]) go to validation; records keep their original order.
std::pair<LabeledDataset, LabeledDataset> split_by_scene(const LabeledDataset& dataset,
                                                         double validation_fraction,
                                                         std::uint64_t seed);

// Applies a band selection to every record.
LabeledDataset band_mask(const LabeledDataset& dataset, std::span<const Window> windows);

}  // namespace spectf

#endif  // SPECTF_DATASET_HPP_

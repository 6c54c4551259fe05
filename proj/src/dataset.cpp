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

#include "spectf/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "spectf/error.hpp"
#include "spectf/rng.hpp"

namespace spectf {

std::string_view label_name(Label label) {
  return label == Label::kCloud ? "cloud" : "clear";
}

Label parse_label(std::string_view name) {
  if (name == "clear") return Label::kClear;
  if (name == "cloud") return Label::kCloud;
  throw FormatError("unknown label '" + std::string(name) + "' (expected clear|cloud)");
}

std::vector<std::string> LabeledDataset::scene_ids() const {
  std::set<std::string> ids;
  for (const auto& r : records) ids.insert(r.scene_id);
  return {ids.begin(), ids.end()};
}

std::size_t LabeledDataset::count(Label label) const {
  return static_cast<std::size_t>(std::count_if(
      records.begin(), records.end(), [label](const DatasetRecord& r) { return r.label == label; }));
}

LabeledDataset sample_dataset(const std::vector<LabeledScene>& scenes, std::size_t cap,
                              std::uint64_t seed) {
  if (cap < 1) throw ContractError("sampling cap must be >= 1");
  LabeledDataset out;
  for (const LabeledScene& scene : scenes) {
    if (scene.labels.size() != scene.cube.pixels()) {
      throw ContractError("scene " + scene.id + ": label count does not match pixel count");
    }
    if (out.grid.empty()) {
      out.grid = scene.cube.grid;
    } else if (!(out.grid == scene.cube.grid)) {
      throw ContractError("scene " + scene.id + " uses a different band grid");
    }
    Rng rng = Rng::stream(seed, scene.id);
    for (Label label : {Label::kClear, Label::kCloud}) {
      std::vector<std::size_t> pixels;
      for (std::size_t p = 0; p < scene.labels.size(); ++p) {
        if (scene.labels[p] == static_cast<std::uint8_t>(label)) pixels.push_back(p);
      }
      // Partial Fisher-Yates: the first `take` slots end up a uniform sample.
      const std::size_t take = std::min(cap, pixels.size());
      for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(pixels.size() - i));
        std::swap(pixels[i], pixels[j]);
      }
      for (std::size_t i = 0; i < take; ++i) {
        const auto px = scene.cube.pixel(pixels[i]);
        if (scene.cube.kind == ValueKind::kRadiance) {
          if (!scene.cube.geometry) {
            throw ContractError("scene " + scene.id + ": radiance cube has no geometry record");
          }
          out.records.push_back({scene.id, label, toa_reflectance(px, *scene.cube.geometry)});
        } else {
          out.records.push_back({scene.id, label, {px.begin(), px.end()}});
        }
      }
    }
  }
  return out;
}

std::pair<LabeledDataset, LabeledDataset> split_by_scene(const LabeledDataset& dataset,
                                                         double validation_fraction,
                                                         std::uint64_t seed) {
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw ContractError("validation fraction must lie in (0, 1)");
  }
  std::vector<std::string> ids = dataset.scene_ids();
  if (ids.size() < 2) throw ContractError("scene split needs at least 2 scenes");
  Rng rng(seed);
  rng.shuffle(std::span<std::string>(ids));
  auto n_val = static_cast<std::size_t>(
      std::llround(validation_fraction * static_cast<double>(ids.size())));
  n_val = std::clamp<std::size_t>(n_val, 1, ids.size() - 1);
  const std::set<std::string> validation(ids.begin(), ids.begin() + static_cast<long>(n_val));

  std::pair<LabeledDataset, LabeledDataset> out{{dataset.grid, {}}, {dataset.grid, {}}};
  for (const auto& r : dataset.records) {
    (validation.contains(r.scene_id) ? out.second : out.first).records.push_back(r);
  }
  return out;
}

LabeledDataset band_mask(const LabeledDataset& dataset, std::span<const Window> windows) {
  const BandSelection sel = band_mask(dataset.grid, windows);
  LabeledDataset out{sel.grid, {}};
  out.records.reserve(dataset.size());
  for (const auto& r : dataset.records) {
    out.records.push_back({r.scene_id, r.label, sel.apply(r.values)});
  }
  return out;
}

}  // namespace spectf

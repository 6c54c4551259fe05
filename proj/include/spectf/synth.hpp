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

#ifndef SPECTF_SYNTH_HPP_
#define SPECTF_SYNTH_HPP_

// Synthetic labeled scenes for desk-scale experiments.
//
// Clear pixel:  rho(l) = floor + (c(l) - floor) * prod_k (1 - g_k(l))
// Cloud pixel:  (1 - f) * clear(l) + f * k(l) * prod_k (1 - (1 - fill_k) g_k(l))
// with linear continua c(l) = a + slope (l - 1440) / 600 for the surface and
// k(l) = C + cloud_slope (l - 1440) / 600 for the cloud (both floored at
// 0.01), Gaussian absorption shapes g_k(l) = exp(-(l - center_k)^2 /
// (2 width_k^2)), cloud cover f, brightness C and tilt drawn per pixel, and
// additive N(0, noise^2) noise. fill_k = 1 means the cloud component fully
// lifts feature k.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "spectf/dataset.hpp"
#include "spectf/spectra.hpp"

namespace spectf {

struct AbsorptionFeature {
  double center_nm;
  double width_nm;
  double cloud_fill;
};

struct Range {
  double lo;
  double hi;
};

struct SynthConfig {
  std::size_t scenes = 24;
  std::size_t lines = 32;
  std::size_t samples = 32;
  BandGrid grid = emit_like_grid();
  double cloud_fraction = 0.4;
  double noise = 0.01;
  double trough_floor = 0.0;
  Range scene_brightness{0.05, 0.55};
  double pixel_brightness_jitter = 0.2;  // relative, uniform +-
  Range surface_slope{-0.15, 0.15};
  Range cloud_brightness{0.2, 0.7};
  Range cloud_slope{-0.15, 0.15};
  Range cloud_cover{0.2, 1.0};
  std::vector<AbsorptionFeature> features{{1380.0, 12.0, 1.0}, {1880.0, 25.0, 0.25}};
  // When set, cubes carry radiance plus a geometry record instead of
  // reflectance.
  bool emit_radiance = false;
  // Dataset-table parameters used by the CLI.
  std::size_t samples_per_class = 100;

  void validate() const;
};

// JSON text <-> config. Missing keys keep their defaults; "grid" is "emit",
// "aviris-ng" or an explicit list of band centers in nm.
SynthConfig parse_synth_config(std::string_view json_text);
std::string synth_config_json(const SynthConfig& config);
SynthConfig load_synth_config(const std::filesystem::path& path);

// Deterministic in (config, seed). Scene ids are "synth_000", "synth_001", ...
std::vector<LabeledScene> synth_generate(const SynthConfig& config, std::uint64_t seed);

// Noise-free reflectance of one clear pixel; exposed for tests.
std::vector<double> synth_clear_spectrum(const SynthConfig& config, double brightness,
                                         double slope);

// Smooth stand-in for exo-atmospheric solar irradiance (W m^-2 nm^-1).
std::vector<double> synthetic_solar_irradiance(const BandGrid& grid);

}  // namespace spectf

#endif  // SPECTF_SYNTH_HPP_

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

#include "spectf/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <numbers>

#include "json.hpp"

#include "spectf/error.hpp"
#include "spectf/rng.hpp"

namespace spectf {
namespace {

double absorption(double wavelength, const AbsorptionFeature& f) {
  const double z = (wavelength - f.center_nm) / f.width_nm;
  return std::exp(-0.5 * z * z);
}

Range range_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("range must be [lo, hi]");
  return {j[0].get<double>(), j[1].get<double>()};
}

void check_range(const Range& r, const char* name) {
  if (!(r.lo <= r.hi)) throw ConfigError(std::string(name) + ": lo > hi");
}

}  // namespace

void SynthConfig::validate() const {
  if (scenes == 0 || lines == 0 || samples == 0) throw ConfigError("synth extents must be > 0");
  if (grid.empty()) throw ConfigError("synth grid is empty");
  if (!(cloud_fraction >= 0.0 && cloud_fraction <= 1.0))
    throw ConfigError("cloud_fraction must be in [0, 1]");
  if (!(noise >= 0.0)) throw ConfigError("noise must be >= 0");
  check_range(scene_brightness, "scene_brightness");
  check_range(surface_slope, "surface_slope");
  check_range(cloud_brightness, "cloud_brightness");
  check_range(cloud_slope, "cloud_slope");
  check_range(cloud_cover, "cloud_cover");
  for (const auto& f : features) {
    if (!(f.width_nm > 0.0)) throw ConfigError("feature width must be > 0");
    if (!(f.cloud_fill >= 0.0 && f.cloud_fill <= 1.0))
      throw ConfigError("feature cloud_fill must be in [0, 1]");
  }
  if (samples_per_class == 0) throw ConfigError("samples_per_class must be >= 1");
}

SynthConfig parse_synth_config(std::string_view json_text) {
  SynthConfig c;
  try {
    const nlohmann::json j = nlohmann::json::parse(json_text);
    c.scenes = j.value("scenes", c.scenes);
    c.lines = j.value("lines", c.lines);
    c.samples = j.value("samples", c.samples);
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      if (g.is_string()) {
        const auto name = g.get<std::string>();
        if (name == "emit") {
          c.grid = emit_like_grid();
        } else if (name == "aviris-ng") {
          c.grid = aviris_ng_like_grid();
        } else {
          throw ConfigError("unknown grid '" + name + "' (emit|aviris-ng|[list])");
        }
      } else {
        c.grid = BandGrid(g.get<std::vector<double>>());
      }
    }
    c.cloud_fraction = j.value("cloud_fraction", c.cloud_fraction);
    c.noise = j.value("noise", c.noise);
    c.trough_floor = j.value("trough_floor", c.trough_floor);
    if (j.contains("scene_brightness")) c.scene_brightness = range_from_json(j["scene_brightness"]);
    c.pixel_brightness_jitter = j.value("pixel_brightness_jitter", c.pixel_brightness_jitter);
    if (j.contains("surface_slope")) c.surface_slope = range_from_json(j["surface_slope"]);
    if (j.contains("cloud_brightness")) c.cloud_brightness = range_from_json(j["cloud_brightness"]);
    if (j.contains("cloud_slope")) c.cloud_slope = range_from_json(j["cloud_slope"]);
    if (j.contains("cloud_cover")) c.cloud_cover = range_from_json(j["cloud_cover"]);
    if (j.contains("features")) {
      c.features.clear();
      for (const auto& f : j["features"]) {
        c.features.push_back({f.at("center_nm").get<double>(), f.at("width_nm").get<double>(),
                              f.at("cloud_fill").get<double>()});
      }
    }
    c.emit_radiance = j.value("emit_radiance", c.emit_radiance);
    c.samples_per_class = j.value("samples_per_class", c.samples_per_class);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("synth config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string synth_config_json(const SynthConfig& c) {
  nlohmann::json j;
  j["scenes"] = c.scenes;
  j["lines"] = c.lines;
  j["samples"] = c.samples;
  j["grid"] = std::vector<double>(c.grid.wavelengths().begin(), c.grid.wavelengths().end());
  j["cloud_fraction"] = c.cloud_fraction;
  j["noise"] = c.noise;
  j["trough_floor"] = c.trough_floor;
  j["scene_brightness"] = {c.scene_brightness.lo, c.scene_brightness.hi};
  j["pixel_brightness_jitter"] = c.pixel_brightness_jitter;
  j["surface_slope"] = {c.surface_slope.lo, c.surface_slope.hi};
  j["cloud_brightness"] = {c.cloud_brightness.lo, c.cloud_brightness.hi};
  j["cloud_slope"] = {c.cloud_slope.lo, c.cloud_slope.hi};
  j["cloud_cover"] = {c.cloud_cover.lo, c.cloud_cover.hi};
  j["features"] = nlohmann::json::array();
  for (const auto& f : c.features) {
    j["features"].push_back(
        {{"center_nm", f.center_nm}, {"width_nm", f.width_nm}, {"cloud_fill", f.cloud_fill}});
  }
  j["emit_radiance"] = c.emit_radiance;
  j["samples_per_class"] = c.samples_per_class;
  return j.dump(2);
}

SynthConfig load_synth_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open synth config " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_synth_config(text);
}

std::vector<double> synth_clear_spectrum(const SynthConfig& config, double brightness,
                                         double slope) {
  std::vector<double> out(config.grid.size());
  for (std::size_t b = 0; b < out.size(); ++b) {
    const double w = config.grid[b];
    const double continuum =
        std::max(0.01, brightness + slope * (w - kWavelengthCenterNm) / kWavelengthScaleNm);
    double transmission = 1.0;
    for (const auto& f : config.features) transmission *= 1.0 - absorption(w, f);
    out[b] = config.trough_floor + (continuum - config.trough_floor) * transmission;
  }
  return out;
}

std::vector<double> synthetic_solar_irradiance(const BandGrid& grid) {
  // 5778 K blackbody shape normalized to 1.9 W m^-2 nm^-1 at 500 nm.
  constexpr double kHc_k = 1.438776877e7;  // nm K
  auto planck = [](double nm) {
    return 1.0 / (std::pow(nm, 5.0) * (std::exp(kHc_k / (nm * 5778.0)) - 1.0));
  };
  const double ref = planck(500.0);
  std::vector<double> e0(grid.size());
  for (std::size_t b = 0; b < e0.size(); ++b) e0[b] = 1.9 * planck(grid[b]) / ref;
  return e0;
}

std::vector<LabeledScene> synth_generate(const SynthConfig& config, std::uint64_t seed) {
  config.validate();
  const std::size_t bands = config.grid.size();
  std::vector<double> cloud_transmission(bands, 1.0);
  for (std::size_t b = 0; b < bands; ++b) {
    for (const auto& f : config.features) {
      cloud_transmission[b] *= 1.0 - (1.0 - f.cloud_fill) * absorption(config.grid[b], f);
    }
  }
  const std::vector<double> e0 = synthetic_solar_irradiance(config.grid);

  std::vector<LabeledScene> scenes;
  scenes.reserve(config.scenes);
  for (std::size_t s = 0; s < config.scenes; ++s) {
    char id[32];
    std::snprintf(id, sizeof id, "synth_%03zu", s);
    Rng rng = Rng::stream(seed, id);
    LabeledScene scene{id, SpectralCube(config.lines, config.samples, config.grid), {}};
    scene.labels.resize(scene.cube.pixels());
    const double base = rng.uniform(config.scene_brightness.lo, config.scene_brightness.hi);
    for (std::size_t p = 0; p < scene.cube.pixels(); ++p) {
      const double brightness =
          base * (1.0 + config.pixel_brightness_jitter * rng.uniform(-1.0, 1.0));
      const double slope = rng.uniform(config.surface_slope.lo, config.surface_slope.hi);
      std::vector<double> rho = synth_clear_spectrum(config, brightness, slope);
      const bool cloudy = rng.bernoulli(config.cloud_fraction);
      if (cloudy) {
        const double cover = rng.uniform(config.cloud_cover.lo, config.cloud_cover.hi);
        const double bright = rng.uniform(config.cloud_brightness.lo, config.cloud_brightness.hi);
        const double tilt = rng.uniform(config.cloud_slope.lo, config.cloud_slope.hi);
        for (std::size_t b = 0; b < bands; ++b) {
          const double level = std::max(
              0.01, bright + tilt * (config.grid[b] - kWavelengthCenterNm) / kWavelengthScaleNm);
          rho[b] = (1.0 - cover) * rho[b] + cover * level * cloud_transmission[b];
        }
      }
      if (config.noise > 0.0) {
        for (double& v : rho) v += config.noise * rng.normal();
      }
      std::copy(rho.begin(), rho.end(), scene.cube.pixel(p).begin());
      scene.labels[p] = static_cast<std::uint8_t>(cloudy ? Label::kCloud : Label::kClear);
    }
    if (config.emit_radiance) {
      GeometryRecord g{rng.uniform(0.2, 1.0), rng.uniform(0.98, 1.02), e0};
      const double factor = std::cos(g.solar_zenith_rad) /
                            (std::numbers::pi * g.earth_sun_distance_au * g.earth_sun_distance_au);
      for (std::size_t p = 0; p < scene.cube.pixels(); ++p) {
        auto px = scene.cube.pixel(p);
        for (std::size_t b = 0; b < bands; ++b) px[b] *= e0[b] * factor;
      }
      scene.cube.kind = ValueKind::kRadiance;
      scene.cube.geometry = std::move(g);
    }
    scenes.push_back(std::move(scene));
  }
  return scenes;
}

}  // namespace spectf

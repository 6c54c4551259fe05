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

#include "spectf/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "spectf/error.hpp"

namespace spectf {

BandGrid::BandGrid(std::vector<double> wavelengths_nm) {
  for (std::size_t i = 0; i < wavelengths_nm.size(); ++i) {
    const double w = wavelengths_nm[i];
    if (!std::isfinite(w) || w < 300.0 || w > 3000.0) {
      throw ContractError("band center " + std::to_string(w) +
                          " nm outside [300, 3000] nm");
    }
    if (i > 0 && !(w > wavelengths_nm[i - 1])) {
      throw ContractError("band centers must be strictly increasing (index " +
                          std::to_string(i) + ")");
    }
  }
  wavelengths_ = std::make_shared<const std::vector<double>>(std::move(wavelengths_nm));
}

std::span<const double> BandGrid::wavelengths() const {
  if (!wavelengths_) return {};
  return *wavelengths_;
}

bool operator==(const BandGrid& a, const BandGrid& b) {
  return std::ranges::equal(a.wavelengths(), b.wavelengths());
}

BandGrid emit_like_grid() {
  std::vector<double> w(285);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 382.5 + 7.4375 * static_cast<double>(i);
  return BandGrid(std::move(w));
}

BandGrid aviris_ng_like_grid() {
  std::vector<double> w(425);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 380.0 + 5.0 * static_cast<double>(i);
  return BandGrid(std::move(w));
}

std::vector<double> normalize_wavelengths(std::span<const double> wavelengths_nm,
                                          double center, double scale) {
  std::vector<double> out(wavelengths_nm.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (wavelengths_nm[i] - center) / scale;
  return out;
}

std::vector<double> normalize_wavelengths(const BandGrid& grid, double center, double scale) {
  return normalize_wavelengths(grid.wavelengths(), center, scale);
}

void Spectrum::validate() const {
  if (values.size() != grid.size()) {
    throw ContractError("spectrum has " + std::to_string(values.size()) +
                        " values for a " + std::to_string(grid.size()) + "-band grid");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw NumericError("spectrum contains non-finite values");
  }
}

void GeometryRecord::validate(std::size_t bands) const {
  // Compared as an angle: cos(pi / 2) rounds to a small positive number.
  if (!(std::fabs(solar_zenith_rad) < std::numbers::pi / 2)) {
    throw NightSceneError("night scene: solar zenith " + std::to_string(solar_zenith_rad) +
                          " rad is at or beyond the horizon");
  }
  if (!(earth_sun_distance_au >= 0.95 && earth_sun_distance_au <= 1.06)) {
    throw ContractError("Earth-Sun distance " + std::to_string(earth_sun_distance_au) +
                        " AU outside [0.95, 1.06]");
  }
  if (solar_irradiance.size() != bands) {
    throw ContractError("solar irradiance has " + std::to_string(solar_irradiance.size()) +
                        " entries for " + std::to_string(bands) + " bands");
  }
  for (double e : solar_irradiance) {
    if (!(e > 0.0) || !std::isfinite(e)) throw ContractError("solar irradiance must be > 0");
  }
}

std::vector<double> toa_reflectance(std::span<const double> radiance,
                                    const GeometryRecord& geometry) {
  geometry.validate(radiance.size());
  const double d2 = geometry.earth_sun_distance_au * geometry.earth_sun_distance_au;
  const double cos_sz = std::cos(geometry.solar_zenith_rad);
  std::vector<double> rho(radiance.size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    rho[i] = std::numbers::pi * radiance[i] * d2 / (geometry.solar_irradiance[i] * cos_sz);
  }
  return rho;
}

SpectralCube::SpectralCube(std::size_t lines_, std::size_t samples_, BandGrid grid_,
                           ValueKind kind_)
    : lines(lines_), samples(samples_), grid(std::move(grid_)), kind(kind_) {
  values.assign(lines * samples * grid.size(), 0.0);
}

std::span<double> SpectralCube::pixel(std::size_t index) {
  return std::span<double>(values).subspan(index * bands(), bands());
}

std::span<const double> SpectralCube::pixel(std::size_t index) const {
  return std::span<const double>(values).subspan(index * bands(), bands());
}

void SpectralCube::validate() const {
  if (lines == 0 || samples == 0 || grid.empty()) {
    throw ContractError("cube extents must be positive");
  }
  if (values.size() != lines * samples * bands()) {
    throw ContractError("cube value count does not match lines x samples x bands");
  }
  if (geometry) geometry->validate(bands());
}

void convert_to_reflectance(SpectralCube& cube) {
  if (cube.kind == ValueKind::kToaReflectance) return;
  if (!cube.geometry) {
    throw ContractError("radiance cube carries no geometry record for TOA conversion");
  }
  for (std::size_t p = 0; p < cube.pixels(); ++p) {
    auto px = cube.pixel(p);
    const auto rho = toa_reflectance(px, *cube.geometry);
    std::copy(rho.begin(), rho.end(), px.begin());
  }
  cube.kind = ValueKind::kToaReflectance;
}

std::vector<Window> emit_exclusion_windows() {
  return {{380.0, 400.0}, {1275.0, 1320.0}, {2450.0, 2500.0}};
}

std::vector<double> BandSelection::apply(std::span<const double> values) const {
  std::vector<double> out(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) out[i] = values[kept[i]];
  return out;
}

BandSelection band_mask(const BandGrid& grid, std::span<const Window> windows) {
  for (const Window& w : windows) {
    if (!(w.lo_nm <= w.hi_nm)) throw ContractError("exclusion window with lo > hi");
  }
  BandSelection sel;
  std::vector<double> kept_nm;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double c = grid[i];
    const bool excluded = std::any_of(windows.begin(), windows.end(), [c](const Window& w) {
      return c >= w.lo_nm && c <= w.hi_nm;
    });
    if (!excluded) {
      sel.kept.push_back(i);
      kept_nm.push_back(c);
    }
  }
  if (sel.kept.empty()) throw ContractError("band mask removed every band (empty spectrum)");
  sel.grid = BandGrid(std::move(kept_nm));
  return sel;
}

Spectrum band_mask(const Spectrum& spectrum, std::span<const Window> windows) {
  spectrum.validate();
  const BandSelection sel = band_mask(spectrum.grid, windows);
  return Spectrum{sel.apply(spectrum.values), sel.grid};
}

SpectralCube band_mask(const SpectralCube& cube, std::span<const Window> windows) {
  const BandSelection sel = band_mask(cube.grid, windows);
  SpectralCube out(cube.lines, cube.samples, sel.grid, cube.kind);
  for (std::size_t p = 0; p < cube.pixels(); ++p) {
    const auto src = cube.pixel(p);
    auto dst = out.pixel(p);
    for (std::size_t i = 0; i < sel.kept.size(); ++i) dst[i] = src[sel.kept[i]];
  }
  if (cube.geometry) {
    GeometryRecord g = *cube.geometry;
    g.solar_irradiance = sel.apply(cube.geometry->solar_irradiance);
    out.geometry = std::move(g);
  }
  return out;
}

std::vector<double> resample_linear(std::span<const double> values, const BandGrid& source,
                                    const BandGrid& target) {
  if (values.size() != source.size() || source.empty()) {
    throw ContractError("resample_linear: values do not match the source grid");
  }
  const auto src = source.wavelengths();
  std::vector<double> out(target.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double w = target[i];
    if (w <= src.front()) {
      out[i] = values.front();
    } else if (w >= src.back()) {
      out[i] = values.back();
    } else {
      const auto hi = static_cast<std::size_t>(std::upper_bound(src.begin(), src.end(), w) -
                                               src.begin());
      const std::size_t lo = hi - 1;
      const double t = (w - src[lo]) / (src[hi] - src[lo]);
      out[i] = values[lo] + t * (values[hi] - values[lo]);
    }
  }
  return out;
}

}  // namespace spectf

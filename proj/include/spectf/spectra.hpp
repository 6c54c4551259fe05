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

#ifndef SPECTF_SPECTRA_HPP_
#define SPECTF_SPECTRA_HPP_

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace spectf {

// Band centers in nm, strictly increasing, all within [300, 3000].
// Copies share the underlying storage.
class BandGrid {
 public:
  BandGrid() = default;
  explicit BandGrid(std::vector<double> wavelengths_nm);

  std::size_t size() const { return wavelengths_ ? wavelengths_->size() : 0; }
  bool empty() const { return size() == 0; }
  std::span<const double> wavelengths() const;
  double operator[](std::size_t i) const { return (*wavelengths_)[i]; }
  double front() const { return (*wavelengths_).front(); }
  double back() const { return (*wavelengths_).back(); }

  friend bool operator==(const BandGrid& a, const BandGrid& b);

 private:
  std::shared_ptr<const std::vector<double>> wavelengths_;
};

// EMIT-like 285-band grid: 382.5 + 7.4375 i nm.
BandGrid emit_like_grid();
// AVIRIS-NG-like 425-band grid: 380 + 5 i nm.
BandGrid aviris_ng_like_grid();

inline constexpr double kWavelengthCenterNm = 1440.0;
inline constexpr double kWavelengthScaleNm = 600.0;

// b' = (b - center) / scale for every band.
std::vector<double> normalize_wavelengths(std::span<const double> wavelengths_nm,
                                          double center = kWavelengthCenterNm,
                                          double scale = kWavelengthScaleNm);
std::vector<double> normalize_wavelengths(const BandGrid& grid,
                                          double center = kWavelengthCenterNm,
                                          double scale = kWavelengthScaleNm);

struct Spectrum {
  std::vector<double> values;
  BandGrid grid;

  // Throws ContractError on a length mismatch, NumericError on non-finite
  // values.
  void validate() const;
};

struct GeometryRecord {
  double solar_zenith_rad = 0.0;
  double earth_sun_distance_au = 1.0;
  std::vector<double> solar_irradiance;  // W m^-2 nm^-1 per band

  void validate(std::size_t bands) const;
};

// rho = pi L d^2 / (E0 cos(theta_s)) per band. Radiance in W m^-2 sr^-1 nm^-1.
std::vector<double> toa_reflectance(std::span<const double> radiance,
                                    const GeometryRecord& geometry);

enum class ValueKind { kRadiance, kToaReflectance };

// Pixel-contiguous raster: values[(line * samples + sample) * bands + band].
struct SpectralCube {
  std::size_t lines = 0;
  std::size_t samples = 0;
  BandGrid grid;
  std::vector<double> values;
  ValueKind kind = ValueKind::kToaReflectance;
  std::optional<GeometryRecord> geometry;

  SpectralCube() = default;
  SpectralCube(std::size_t lines, std::size_t samples, BandGrid grid,
               ValueKind kind = ValueKind::kToaReflectance);

  std::size_t bands() const { return grid.size(); }
  std::size_t pixels() const { return lines * samples; }
  std::span<double> pixel(std::size_t index);
  std::span<const double> pixel(std::size_t index) const;
  std::span<const double> pixel(std::size_t line, std::size_t sample) const {
    return pixel(line * samples + sample);
  }
  void validate() const;
};

// Converts a radiance cube in place using its geometry record. A cube that
// is already reflectance is left alone. Throws ContractError when a radiance
// cube has no geometry.
void convert_to_reflectance(SpectralCube& cube);

struct Window {
  double lo_nm;
  double hi_nm;
};

// 380-400, 1275-1320 and 2450-2500 nm.
std::vector<Window> emit_exclusion_windows();

struct BandSelection {
  BandGrid grid;
  std::vector<std::size_t> kept;  // indices into the source grid

  std::vector<double> apply(std::span<const double> values) const;
};

// Drops every band whose center lies inside any closed window. Throws
// ContractError if every band is dropped or a window has lo > hi.
BandSelection band_mask(const BandGrid& grid, std::span<const Window> windows);
Spectrum band_mask(const Spectrum& spectrum, std::span<const Window> windows);
SpectralCube band_mask(const SpectralCube& cube, std::span<const Window> windows);

// Piecewise-linear resampling onto `target`; values beyond the source span
// take the nearest end value.
std::vector<double> resample_linear(std::span<const double> values, const BandGrid& source,
                                    const BandGrid& target);

}  // namespace spectf

#endif  // SPECTF_SPECTRA_HPP_

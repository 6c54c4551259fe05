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

#ifndef SPECTF_CUBE_IO_HPP_
#define SPECTF_CUBE_IO_HPP_

// Raster containers: a raw little-endian payload at `path` and a text
// sidecar at `path` + ".hdr". See docs/formats.md for the header grammar.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spectf/spectra.hpp"

namespace spectf {

enum class Interleave { kBsq, kBil, kBip };

std::string_view interleave_name(Interleave interleave);

// Parsed cube sidecar, before the payload is touched.
struct CubeHeader {
  int version = 1;
  std::size_t lines = 0;
  std::size_t samples = 0;
  std::size_t bands = 0;
  Interleave interleave = Interleave::kBsq;
  std::string value_kind;  // radiance | toa-reflectance | cloud-probability
  std::vector<double> wavelengths_nm;
  std::optional<double> solar_zenith_rad;
  std::optional<double> earth_sun_distance_au;
  std::vector<double> solar_irradiance;
};

// Throws FormatError naming the offending key or line.
CubeHeader parse_cube_header(std::string_view text);
std::string format_cube_header(const CubeHeader& header);

std::filesystem::path sidecar_path(const std::filesystem::path& payload);

SpectralCube read_cube(const std::filesystem::path& path);
// Always writes band-sequential unless another interleave is requested.
void write_cube(const SpectralCube& cube, const std::filesystem::path& path,
                Interleave interleave = Interleave::kBsq);

// Single-band cloud probability raster, stored as a cube with value kind
// cloud-probability and no wavelength list.
struct ProbabilityMap {
  std::size_t lines = 0;
  std::size_t samples = 0;
  std::vector<double> values;  // line-major, NaN for no-data
};

void write_probability_map(const ProbabilityMap& map, const std::filesystem::path& path);
ProbabilityMap read_probability_map(const std::filesystem::path& path);

inline constexpr std::uint8_t kMaskClear = 0;
inline constexpr std::uint8_t kMaskCloud = 1;
inline constexpr std::uint8_t kMaskNoData = 255;

// 8-bit class raster. Also used for per-pixel label masks, which have no
// threshold or model checksum.
struct MaskRaster {
  std::size_t lines = 0;
  std::size_t samples = 0;
  std::vector<std::uint8_t> values;
  std::optional<double> threshold;
  std::string model_checksum;  // empty when not produced by a model

  void validate() const;
};

void write_mask(const MaskRaster& mask, const std::filesystem::path& path);
MaskRaster read_mask(const std::filesystem::path& path);

}  // namespace spectf

#endif  // SPECTF_CUBE_IO_HPP_

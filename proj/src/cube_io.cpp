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

#include "spectf/cube_io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "spectf/error.hpp"
#include "spectf/table_io.hpp"

namespace spectf {
namespace {

static_assert(std::endian::native == std::endian::little,
              "payload conversion assumes a little-endian host");

constexpr std::string_view kCubeMagic = "SPECTF-CUBE";
constexpr std::string_view kMaskMagic = "SPECTF-MASK";

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double to_double(std::string_view text, std::string_view key) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw FormatError("header key '" + std::string(key) + "': bad number '" + std::string(text) + "'");
  }
  return v;
}

std::size_t to_count(std::string_view text, std::string_view key) {
  text = trim(text);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || v == 0) {
    throw FormatError("header key '" + std::string(key) + "': expected a positive integer, got '" +
                      std::string(text) + "'");
  }
  return v;
}

std::vector<double> to_list(std::string_view text, std::string_view key) {
  text = trim(text);
  if (text.size() < 2 || text.front() != '{' || text.back() != '}') {
    throw FormatError("header key '" + std::string(key) + "': list must be enclosed in { }");
  }
  text = trim(text.substr(1, text.size() - 2));
  std::vector<double> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = text.find(',', start);
    out.push_back(to_double(text.substr(start, comma == std::string_view::npos ? comma : comma - start), key));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string format_list(const std::vector<double>& values) {
  std::string s = "{";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ", ";
    s += format_double(values[i]);
  }
  s += "}";
  return s;
}

// Splits a header into its version and key/value pairs. Lists may span
// several lines; a value that opens '{' continues until the closing '}'.
struct RawHeader {
  int version = 0;
  std::map<std::string, std::string, std::less<>> entries;
};

RawHeader parse_raw(std::string_view text, std::string_view magic) {
  RawHeader raw;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty header");
  {
    const std::string_view first = trim(line);
    if (first.substr(0, magic.size()) != magic) {
      throw FormatError("header does not start with '" + std::string(magic) + "'");
    }
    const std::string_view ver = trim(first.substr(magic.size()));
    int v = 0;
    const auto [ptr, ec] = std::from_chars(ver.data(), ver.data() + ver.size(), v);
    if (ec != std::errc() || ptr != ver.data() + ver.size()) {
      throw FormatError("header version '" + std::string(ver) + "' is not an integer");
    }
    if (v != 1) throw VersionError("unsupported header version " + std::to_string(v));
    raw.version = v;
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view l = trim(line);
    if (l.empty() || l.front() == ';') continue;
    const std::size_t eq = l.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError("header line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key(trim(l.substr(0, eq)));
    std::string value(trim(l.substr(eq + 1)));
    if (!value.empty() && value.front() == '{') {
      while (value.back() != '}') {
        if (!std::getline(in, line)) throw FormatError("unterminated list for key '" + key + "'");
        ++line_no;
        value += ' ';
        value += trim(line);
      }
    }
    if (!raw.entries.emplace(key, value).second) {
      throw FormatError("duplicate header key '" + key + "'");
    }
  }
  return raw;
}

std::string_view require(const RawHeader& raw, std::string_view key) {
  const auto it = raw.entries.find(key);
  if (it == raw.entries.end()) throw FormatError("header is missing key '" + std::string(key) + "'");
  return it->second;
}

const std::string* find(const RawHeader& raw, std::string_view key) {
  const auto it = raw.entries.find(key);
  return it == raw.entries.end() ? nullptr : &it->second;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<char> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
  if (!out) throw FormatError("short write to " + path.string());
}

void write_floats(const std::filesystem::path& path, const std::vector<float>& values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(float)));
  if (!out) throw FormatError("short write to " + path.string());
}

// Reads the payload for a parsed header into pixel-contiguous doubles.
std::vector<double> read_payload(const std::filesystem::path& path, const CubeHeader& h) {
  const std::vector<char> bytes = read_bytes(path);
  const std::size_t count = h.lines * h.samples * h.bands;
  if (bytes.size() != count * sizeof(float)) {
    throw FormatError("payload size mismatch: " + path.string() + " has " + std::to_string(bytes.size()) +
                      " bytes, header implies " + std::to_string(count * sizeof(float)));
  }
  std::vector<float> raw(count);
  std::memcpy(raw.data(), bytes.data(), bytes.size());
  std::vector<double> out(count);
  const std::size_t L = h.lines, S = h.samples, B = h.bands;
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t s = 0; s < S; ++s) {
      for (std::size_t b = 0; b < B; ++b) {
        std::size_t src = 0;
        switch (h.interleave) {
          case Interleave::kBsq: src = (b * L + l) * S + s; break;
          case Interleave::kBil: src = (l * B + b) * S + s; break;
          case Interleave::kBip: src = (l * S + s) * B + b; break;
        }
        out[(l * S + s) * B + b] = raw[src];
      }
    }
  }
  return out;
}

std::vector<float> pack_payload(std::span<const double> values, std::size_t L, std::size_t S,
                                std::size_t B, Interleave interleave) {
  std::vector<float> out(values.size());
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t s = 0; s < S; ++s) {
      for (std::size_t b = 0; b < B; ++b) {
        std::size_t dst = 0;
        switch (interleave) {
          case Interleave::kBsq: dst = (b * L + l) * S + s; break;
          case Interleave::kBil: dst = (l * B + b) * S + s; break;
          case Interleave::kBip: dst = (l * S + s) * B + b; break;
        }
        out[dst] = static_cast<float>(values[(l * S + s) * B + b]);
      }
    }
  }
  return out;
}

}  // namespace

std::string_view interleave_name(Interleave interleave) {
  switch (interleave) {
    case Interleave::kBsq: return "bsq";
    case Interleave::kBil: return "bil";
    case Interleave::kBip: return "bip";
  }
  return "bsq";
}

CubeHeader parse_cube_header(std::string_view text) {
  const RawHeader raw = parse_raw(text, kCubeMagic);
  CubeHeader h;
  h.version = raw.version;
  h.lines = to_count(require(raw, "lines"), "lines");
  h.samples = to_count(require(raw, "samples"), "samples");
  h.bands = to_count(require(raw, "bands"), "bands");
  const std::string_view il = require(raw, "interleave");
  if (il == "bsq") {
    h.interleave = Interleave::kBsq;
  } else if (il == "bil") {
    h.interleave = Interleave::kBil;
  } else if (il == "bip") {
    h.interleave = Interleave::kBip;
  } else {
    throw FormatError("unknown interleave '" + std::string(il) + "' (expected bsq, bil or bip)");
  }
  h.value_kind = std::string(require(raw, "value kind"));
  if (h.value_kind != "radiance" && h.value_kind != "toa-reflectance" &&
      h.value_kind != "cloud-probability") {
    throw FormatError("unknown value kind '" + h.value_kind + "'");
  }
  if (const auto* w = find(raw, "wavelength")) {
    h.wavelengths_nm = to_list(*w, "wavelength");
  }
  if (h.value_kind == "cloud-probability") {
    if (h.bands != 1) throw FormatError("cloud-probability raster must have bands = 1");
  } else if (h.wavelengths_nm.size() != h.bands) {
    throw FormatError("wavelength count mismatch: header declares bands = " + std::to_string(h.bands) +
                      " but lists " + std::to_string(h.wavelengths_nm.size()) + " wavelengths");
  }
  if (const auto* v = find(raw, "solar zenith")) h.solar_zenith_rad = to_double(*v, "solar zenith");
  if (const auto* v = find(raw, "earth sun distance")) {
    h.earth_sun_distance_au = to_double(*v, "earth sun distance");
  }
  if (const auto* v = find(raw, "solar irradiance")) {
    h.solar_irradiance = to_list(*v, "solar irradiance");
    if (h.solar_irradiance.size() != h.bands) {
      throw FormatError("solar irradiance count " + std::to_string(h.solar_irradiance.size()) +
                        " does not match bands = " + std::to_string(h.bands));
    }
  }
  const bool any_geom = h.solar_zenith_rad || h.earth_sun_distance_au || !h.solar_irradiance.empty();
  const bool all_geom = h.solar_zenith_rad && h.earth_sun_distance_au && !h.solar_irradiance.empty();
  if (any_geom && !all_geom) {
    throw FormatError("geometry record needs solar zenith, earth sun distance and solar irradiance");
  }
  return h;
}

std::string format_cube_header(const CubeHeader& h) {
  std::string s;
  s += std::string(kCubeMagic) + " " + std::to_string(h.version) + "\n";
  s += "lines = " + std::to_string(h.lines) + "\n";
  s += "samples = " + std::to_string(h.samples) + "\n";
  s += "bands = " + std::to_string(h.bands) + "\n";
  s += "interleave = " + std::string(interleave_name(h.interleave)) + "\n";
  s += "value kind = " + h.value_kind + "\n";
  if (!h.wavelengths_nm.empty()) s += "wavelength = " + format_list(h.wavelengths_nm) + "\n";
  if (h.solar_zenith_rad) s += "solar zenith = " + format_double(*h.solar_zenith_rad) + "\n";
  if (h.earth_sun_distance_au) {
    s += "earth sun distance = " + format_double(*h.earth_sun_distance_au) + "\n";
  }
  if (!h.solar_irradiance.empty()) s += "solar irradiance = " + format_list(h.solar_irradiance) + "\n";
  return s;
}

std::filesystem::path sidecar_path(const std::filesystem::path& payload) {
  std::filesystem::path p = payload;
  p += ".hdr";
  return p;
}

SpectralCube read_cube(const std::filesystem::path& path) {
  const CubeHeader h = parse_cube_header(read_text(sidecar_path(path)));
  if (h.value_kind == "cloud-probability") {
    throw FormatError(path.string() + " is a probability raster, not a spectral cube");
  }
  SpectralCube cube;
  cube.lines = h.lines;
  cube.samples = h.samples;
  try {
    cube.grid = BandGrid(h.wavelengths_nm);
  } catch (const ContractError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  cube.kind = h.value_kind == "radiance" ? ValueKind::kRadiance : ValueKind::kToaReflectance;
  if (h.solar_zenith_rad) {
    cube.geometry = GeometryRecord{*h.solar_zenith_rad, *h.earth_sun_distance_au, h.solar_irradiance};
  }
  cube.values = read_payload(path, h);
  return cube;
}

void write_cube(const SpectralCube& cube, const std::filesystem::path& path, Interleave interleave) {
  if (cube.lines == 0 || cube.samples == 0 || cube.grid.empty() ||
      cube.values.size() != cube.lines * cube.samples * cube.bands()) {
    throw ContractError("cannot write a cube whose value count does not match its extents");
  }
  CubeHeader h;
  h.lines = cube.lines;
  h.samples = cube.samples;
  h.bands = cube.bands();
  h.interleave = interleave;
  h.value_kind = cube.kind == ValueKind::kRadiance ? "radiance" : "toa-reflectance";
  h.wavelengths_nm.assign(cube.grid.wavelengths().begin(), cube.grid.wavelengths().end());
  if (cube.geometry) {
    h.solar_zenith_rad = cube.geometry->solar_zenith_rad;
    h.earth_sun_distance_au = cube.geometry->earth_sun_distance_au;
    h.solar_irradiance = cube.geometry->solar_irradiance;
  }
  write_floats(path, pack_payload(cube.values, h.lines, h.samples, h.bands, interleave));
  write_text(sidecar_path(path), format_cube_header(h));
}

void write_probability_map(const ProbabilityMap& map, const std::filesystem::path& path) {
  if (map.lines == 0 || map.samples == 0 || map.values.size() != map.lines * map.samples) {
    throw ContractError("probability map value count does not match its extents");
  }
  CubeHeader h;
  h.lines = map.lines;
  h.samples = map.samples;
  h.bands = 1;
  h.value_kind = "cloud-probability";
  write_floats(path, pack_payload(map.values, h.lines, h.samples, 1, Interleave::kBsq));
  write_text(sidecar_path(path), format_cube_header(h));
}

ProbabilityMap read_probability_map(const std::filesystem::path& path) {
  const CubeHeader h = parse_cube_header(read_text(sidecar_path(path)));
  if (h.value_kind != "cloud-probability") {
    throw FormatError(path.string() + " is not a cloud-probability raster");
  }
  return ProbabilityMap{h.lines, h.samples, read_payload(path, h)};
}

void MaskRaster::validate() const {
  if (lines == 0 || samples == 0 || values.size() != lines * samples) {
    throw ContractError("mask value count does not match its extents");
  }
  for (std::uint8_t v : values) {
    if (v != kMaskClear && v != kMaskCloud && v != kMaskNoData) {
      throw FormatError("mask value " + std::to_string(v) + " is not 0, 1 or 255");
    }
  }
}

void write_mask(const MaskRaster& mask, const std::filesystem::path& path) {
  mask.validate();
  std::string h = std::string(kMaskMagic) + " 1\n";
  h += "lines = " + std::to_string(mask.lines) + "\n";
  h += "samples = " + std::to_string(mask.samples) + "\n";
  if (mask.threshold) h += "threshold = " + format_double(*mask.threshold) + "\n";
  if (!mask.model_checksum.empty()) h += "model checksum = " + mask.model_checksum + "\n";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(mask.values.data()),
            static_cast<std::streamsize>(mask.values.size()));
  if (!out) throw FormatError("short write to " + path.string());
  write_text(sidecar_path(path), h);
}

MaskRaster read_mask(const std::filesystem::path& path) {
  const RawHeader raw = parse_raw(read_text(sidecar_path(path)), kMaskMagic);
  MaskRaster mask;
  mask.lines = to_count(require(raw, "lines"), "lines");
  mask.samples = to_count(require(raw, "samples"), "samples");
  if (const auto* v = find(raw, "threshold")) mask.threshold = to_double(*v, "threshold");
  if (const auto* v = find(raw, "model checksum")) mask.model_checksum = *v;
  const std::vector<char> bytes = read_bytes(path);
  if (bytes.size() != mask.lines * mask.samples) {
    throw FormatError("payload size mismatch: " + path.string() + " has " + std::to_string(bytes.size()) +
                      " bytes, header implies " + std::to_string(mask.lines * mask.samples));
  }
  mask.values.assign(bytes.begin(), bytes.end());
  mask.validate();
  return mask;
}

}  // namespace spectf

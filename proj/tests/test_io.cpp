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

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "doctest.h"
#include "spectf/cube_io.hpp"
#include "spectf/error.hpp"
#include "spectf/rng.hpp"
#include "spectf/synth.hpp"
#include "spectf/table_io.hpp"
#include "support.hpp"

using namespace spectf;
using spectf::testing::ScratchDir;

namespace {

const std::filesystem::path kData = SPECTF_TEST_DATA_DIR;

// The reference value stored at pixel (l, s, b) of the conformance cubes.
double reference_value(std::size_t l, std::size_t s, std::size_t b) {
  return 100.0 * l + 10.0 * s + b + 0.5;
}

SpectralCube random_cube(std::size_t lines, std::size_t samples, std::size_t bands, Rng& rng) {
  SpectralCube cube(lines, samples, BandGrid(spectf::testing::random_wavelengths(bands, rng)),
                    ValueKind::kToaReflectance);
  for (double& v : cube.values) v = static_cast<float>(rng.uniform(-1.0, 2.0));
  return cube;
}

std::vector<char> file_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("conformance cubes in all three interleaves") {
  for (const char* name : {"cube_bsq.raw", "cube_bil.raw", "cube_bip.raw"}) {
    CAPTURE(name);
    const SpectralCube cube = read_cube(kData / name);
    REQUIRE(cube.lines == 2);
    REQUIRE(cube.samples == 3);
    REQUIRE(cube.bands() == 4);
    CHECK(cube.kind == ValueKind::kToaReflectance);
    CHECK(cube.grid[1] == 500.5);
    CHECK(cube.grid[3] == 700.25);
    CHECK_FALSE(cube.geometry.has_value());
    for (std::size_t l = 0; l < 2; ++l)
      for (std::size_t s = 0; s < 3; ++s)
        for (std::size_t b = 0; b < 4; ++b)
          CHECK(cube.pixel(l * 3 + s)[b] == reference_value(l, s, b));
  }
}

TEST_CASE("conformance cube with comments, a wrapped list and geometry") {
  const SpectralCube cube = read_cube(kData / "cube_geometry.raw");
  CHECK(cube.kind == ValueKind::kRadiance);
  REQUIRE(cube.geometry.has_value());
  CHECK(cube.geometry->solar_zenith_rad == 0.5);
  CHECK(cube.geometry->earth_sun_distance_au == 1.01);
  CHECK(cube.geometry->solar_irradiance == std::vector<double>{1500, 1400, 1300, 1200});
  CHECK(cube.grid[3] == 700.25);
  CHECK(cube.pixel(5)[3] == reference_value(1, 2, 3));
}

TEST_CASE("writer output matches the conformance payloads byte for byte") {
  ScratchDir dir("conf");
  const SpectralCube cube = read_cube(kData / "cube_bsq.raw");
  for (auto [il, name] : {std::pair{Interleave::kBsq, "cube_bsq.raw"},
                          std::pair{Interleave::kBil, "cube_bil.raw"},
                          std::pair{Interleave::kBip, "cube_bip.raw"}}) {
    write_cube(cube, dir / "out.raw", il);
    CHECK(file_bytes(dir / "out.raw") == file_bytes(kData / name));
    CHECK(read_cube(dir / "out.raw").values == cube.values);
  }
}

TEST_CASE("malformed conformance vectors raise named errors") {
  auto message = [](const char* name) {
    try {
      read_cube(kData / name);
    } catch (const FormatError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("bad_wavelength_count.raw").find("wavelength count mismatch") != std::string::npos);
  CHECK(message("bad_interleave.raw").find("unknown interleave") != std::string::npos);
  CHECK(message("bad_payload_size.raw").find("payload size mismatch") != std::string::npos);
  CHECK(message("bad_missing_key.raw").find("samples") != std::string::npos);
  CHECK(message("bad_partial_geometry.raw").find("geometry") != std::string::npos);
  CHECK_THROWS_AS(read_cube(kData / "bad_version.raw"), VersionError);
  CHECK_THROWS_AS(read_cube(kData / "missing.raw"), FormatError);
}

TEST_CASE("header parser") {
  const std::string good =
      "SPECTF-CUBE 1\nlines = 1\nsamples = 1\nbands = 2\ninterleave = bip\n"
      "value kind = radiance\nwavelength = {500, 600}\n";
  const CubeHeader h = parse_cube_header(good);
  CHECK(h.interleave == Interleave::kBip);
  CHECK(h.wavelengths_nm == std::vector<double>{500, 600});
  CHECK(parse_cube_header(format_cube_header(h)).wavelengths_nm == h.wavelengths_nm);
  // bands = 10 with 9 wavelengths.
  std::string bad = "SPECTF-CUBE 1\nlines = 1\nsamples = 1\nbands = 10\ninterleave = bsq\n"
                    "value kind = radiance\nwavelength = {1, 2, 3, 4, 5, 6, 7, 8, 9}\n";
  CHECK_THROWS_AS(parse_cube_header(bad), FormatError);
  CHECK_THROWS_AS(parse_cube_header(good + "lines = 2\n"), FormatError);
  CHECK_THROWS_AS(parse_cube_header(good + "junk\n"), FormatError);
  CHECK_THROWS_AS(parse_cube_header("ENVI\n"), FormatError);
  CHECK_THROWS_AS(parse_cube_header(""), FormatError);
  CHECK_THROWS_AS(
      parse_cube_header("SPECTF-CUBE 1\nlines = 0\nsamples = 1\nbands = 1\ninterleave = bsq\n"
                        "value kind = radiance\nwavelength = {500}\n"),
      FormatError);
  CHECK_THROWS_AS(
      parse_cube_header("SPECTF-CUBE 1\nlines = 1\nsamples = 1\nbands = 1\ninterleave = bsq\n"
                        "value kind = counts\nwavelength = {500}\n"),
      FormatError);
}

TEST_CASE("cube round trip is bitwise at 32-bit precision") {
  ScratchDir dir("cube");
  Rng rng(1);
  SpectralCube cube = random_cube(5, 7, 11, rng);
  cube.geometry = GeometryRecord{0.3, 0.99, synthetic_solar_irradiance(cube.grid)};
  for (Interleave il : {Interleave::kBsq, Interleave::kBil, Interleave::kBip}) {
    write_cube(cube, dir / "c.raw", il);
    const SpectralCube back = read_cube(dir / "c.raw");
    CHECK(back.values == cube.values);
    CHECK(back.grid == cube.grid);
    REQUIRE(back.geometry.has_value());
    CHECK(back.geometry->solar_irradiance == cube.geometry->solar_irradiance);
    CHECK(std::filesystem::file_size(dir / "c.raw") == 4u * 5 * 7 * 11);
  }
  // Values are rounded to float32 on the way out.
  SpectralCube fine(1, 1, BandGrid(std::vector<double>{500.0}), ValueKind::kToaReflectance);
  fine.values[0] = 0.1;
  write_cube(fine, dir / "f.raw");
  CHECK(read_cube(dir / "f.raw").values[0] == static_cast<double>(0.1f));
  // Non-finite values survive as such.
  fine.values[0] = std::numeric_limits<double>::quiet_NaN();
  write_cube(fine, dir / "f.raw");
  CHECK(std::isnan(read_cube(dir / "f.raw").values[0]));
  SpectralCube broken = fine;
  broken.values.push_back(0.0);
  CHECK_THROWS_AS(write_cube(broken, dir / "b.raw"), ContractError);
}

TEST_CASE("probability map") {
  ScratchDir dir("prob");
  ProbabilityMap map{2, 2, {0.25, std::numeric_limits<double>::quiet_NaN(), 1.0, 0.0}};
  write_probability_map(map, dir / "p.raw");
  const ProbabilityMap back = read_probability_map(dir / "p.raw");
  CHECK(back.lines == 2);
  CHECK(back.values[0] == 0.25);
  CHECK(std::isnan(back.values[1]));
  CHECK_THROWS_AS(read_cube(dir / "p.raw"), FormatError);
  CHECK_THROWS_AS(read_probability_map(kData / "cube_bsq.raw"), FormatError);
}

TEST_CASE("mask raster") {
  ScratchDir dir("mask");
  const MaskRaster conf = read_mask(kData / "mask.raw");
  CHECK(conf.lines == 2);
  CHECK(conf.values == std::vector<std::uint8_t>{0, 1, 255, 1, 0, 0});
  CHECK(conf.threshold == 0.5);
  CHECK(conf.model_checksum == "1a2b3c4d");
  CHECK_THROWS_AS(read_mask(kData / "bad_mask_value.raw"), FormatError);

  write_mask(conf, dir / "m.raw");
  CHECK(file_bytes(dir / "m.raw") == file_bytes(kData / "mask.raw"));
  const MaskRaster back = read_mask(dir / "m.raw");
  CHECK(back.values == conf.values);
  CHECK(back.model_checksum == conf.model_checksum);

  MaskRaster labels{1, 2, {0, 1}, std::nullopt, ""};
  write_mask(labels, dir / "l.raw");
  CHECK_FALSE(read_mask(dir / "l.raw").threshold.has_value());
  MaskRaster bad{1, 2, {0, 7}, std::nullopt, ""};
  CHECK_THROWS_AS(write_mask(bad, dir / "x.raw"), FormatError);
}

TEST_CASE("dataset tables") {
  ScratchDir dir("table");
  const LabeledDataset conf = read_dataset_table(kData / "dataset.csv");
  REQUIRE(conf.size() == 2);
  CHECK(conf.grid[1] == 1250.5);
  CHECK(conf.records[0].scene_id == "synth_000");
  CHECK(conf.records[0].label == Label::kCloud);
  CHECK(conf.records[1].values[2] == static_cast<double>(0.01f));
  CHECK_THROWS_AS(read_dataset_table(kData / "bad_dataset_ragged.csv"), FormatError);
  CHECK_THROWS_AS(read_dataset_table(kData / "bad_dataset_label.csv"), FormatError);

  Rng rng(2);
  LabeledDataset d;
  d.grid = BandGrid(spectf::testing::random_wavelengths(9, rng));
  for (int i = 0; i < 20; ++i) {
    std::vector<double> v(9);
    for (double& x : v) x = static_cast<float>(rng.uniform(0.0, 1.0));
    d.records.push_back({"scene_" + std::to_string(i % 3), i % 2 ? Label::kCloud : Label::kClear, v});
  }
  write_dataset_table(d, dir / "d.csv");
  const LabeledDataset back = read_dataset_table(dir / "d.csv");
  CHECK(back.grid == d.grid);
  REQUIRE(back.size() == d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(back.records[i].scene_id == d.records[i].scene_id);
    CHECK(back.records[i].label == d.records[i].label);
    CHECK(back.records[i].values == d.records[i].values);
  }
  write_text_file(dir / "bad.csv", "scene_id,label,500\ns,clear,abc\n");
  CHECK_THROWS_AS(read_dataset_table(dir / "bad.csv"), FormatError);
  write_text_file(dir / "bad2.csv", "id,label,500\n");
  CHECK_THROWS_AS(read_dataset_table(dir / "bad2.csv"), FormatError);
}

TEST_CASE("score tables and number formatting") {
  ScratchDir dir("scores");
  const std::vector<double> scores{0.1, 1.0 / 3.0, 0.0, 1.0, 5e-324};
  write_score_table(scores, dir / "s.txt");
  CHECK(read_score_table(dir / "s.txt") == scores);
  write_text_file(dir / "bad.txt", "p_cloud\n0.5\nxyz\n");
  CHECK_THROWS_AS(read_score_table(dir / "bad.txt"), FormatError);
  CHECK(format_float(0.1) == "0.1");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
}

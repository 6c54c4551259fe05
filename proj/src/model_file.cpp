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

#include "spectf/model_file.hpp"

#include <zlib.h>

#include <array>
#include <bit>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <vector>

#include "json.hpp"
#include "spectf/error.hpp"

namespace spectf {
namespace {

constexpr std::array<char, 8> kMagic = {'S', 'P', 'T', 'F', 'M', 'D', 'L', '\n'};

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::uint32_t crc_of(const std::vector<unsigned char>& bytes, std::size_t offset = 0) {
  uLong crc = crc32(0L, Z_NULL, 0);
  if (bytes.size() > offset) {
    crc = crc32(crc, bytes.data() + offset, static_cast<uInt>(bytes.size() - offset));
  }
  return static_cast<std::uint32_t>(crc);
}

nlohmann::json preprocessing_to_json(const Preprocessing& p) {
  nlohmann::json j;
  j["wavelength_center_nm"] = p.wavelength_center_nm;
  j["wavelength_scale_nm"] = p.wavelength_scale_nm;
  j["exclusion_windows_nm"] = nlohmann::json::array();
  for (const auto& w : p.exclusion_windows) j["exclusion_windows_nm"].push_back({w.lo_nm, w.hi_nm});
  if (p.training_span) j["training_span_nm"] = {p.training_span->lo_nm, p.training_span->hi_nm};
  return j;
}

Preprocessing preprocessing_from_json(const nlohmann::json& j) {
  Preprocessing p;
  p.wavelength_center_nm = j.at("wavelength_center_nm").get<double>();
  p.wavelength_scale_nm = j.at("wavelength_scale_nm").get<double>();
  if (!(p.wavelength_scale_nm > 0.0)) throw FormatError("wavelength scale must be > 0");
  p.exclusion_windows.clear();
  for (const auto& w : j.at("exclusion_windows_nm")) {
    p.exclusion_windows.push_back({w.at(0).get<double>(), w.at(1).get<double>()});
  }
  if (j.contains("training_span_nm")) {
    const auto& s = j["training_span_nm"];
    p.training_span = Window{s.at(0).get<double>(), s.at(1).get<double>()};
  }
  return p;
}

}  // namespace

std::string format_crc32(std::uint32_t crc) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08x", crc);
  return buf;
}

void write_model_file(const std::filesystem::path& path, const ModelFileContents& contents) {
  std::vector<unsigned char> payload;
  payload.reserve(contents.parameters.scalar_count() * 4);
  nlohmann::json directory = nlohmann::json::array();
  for (std::size_t t = 0; t < contents.parameters.size(); ++t) {
    const Tensor& tensor = contents.parameters[t];
    directory.push_back({{"name", contents.parameters.name(t)},
                         {"shape", tensor.shape()},
                         {"offset", payload.size()},
                         {"count", tensor.size()}});
    for (double v : tensor.data()) put_u32(payload, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  nlohmann::json manifest;
  manifest["format"] = "spectf-model";
  manifest["format_version"] = kModelFormatVersion;
  manifest["architecture"] = contents.architecture;
  manifest["config"] = nlohmann::json::parse(contents.config_json);
  manifest["preprocessing"] = preprocessing_to_json(contents.preprocessing);
  if (contents.decision_threshold) manifest["decision_threshold"] = *contents.decision_threshold;
  manifest["tensors"] = std::move(directory);
  manifest["payload_bytes"] = payload.size();
  manifest["payload_crc32"] = format_crc32(crc_of(payload));
  const std::string text = manifest.dump(1);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write model file " + path.string());
  out.write(kMagic.data(), kMagic.size());
  const auto m = static_cast<std::uint64_t>(text.size());
  for (int i = 0; i < 8; ++i) out.put(static_cast<char>(m >> (8 * i)));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
  if (!out) throw FormatError("short write to " + path.string());
}

bool is_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size())) return false;
  return magic == kMagic;
}

ModelFileContents read_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open model file " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  if (bytes.size() < 16 || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw FormatError(path.string() + " is not a model file (bad magic)");
  }
  std::uint64_t m = 0;
  for (int i = 0; i < 8; ++i) m |= static_cast<std::uint64_t>(bytes[8 + i]) << (8 * i);
  if (m > bytes.size() - 16) throw ChecksumError("model file truncated inside the manifest");
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(bytes.begin() + 16, bytes.begin() + 16 + static_cast<long>(m));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model manifest: ") + e.what());
  }

  ModelFileContents contents;
  try {
    if (manifest.value("format", "") != "spectf-model") throw FormatError("not a spectf-model manifest");
    const int version = manifest.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      throw VersionError("model format version " + std::to_string(version) + " unsupported (expected " +
                         std::to_string(kModelFormatVersion) + ")");
    }
    contents.architecture = manifest.at("architecture").get<std::string>();
    contents.config_json = manifest.at("config").dump();
    contents.preprocessing = preprocessing_from_json(manifest.at("preprocessing"));
    if (manifest.contains("decision_threshold")) {
      contents.decision_threshold = manifest["decision_threshold"].get<double>();
    }
    const std::size_t payload_offset = 16 + m;
    const auto declared = manifest.at("payload_bytes").get<std::size_t>();
    if (bytes.size() - payload_offset != declared) {
      throw ChecksumError("model payload has " + std::to_string(bytes.size() - payload_offset) +
                          " bytes, manifest declares " + std::to_string(declared) +
                          " (truncated or padded file)");
    }
    const std::uint32_t crc = crc_of(bytes, payload_offset);
    if (format_crc32(crc) != manifest.at("payload_crc32").get<std::string>()) {
      throw ChecksumError("model payload CRC-32 mismatch");
    }
    contents.payload_crc32 = crc;
    for (const auto& entry : manifest.at("tensors")) {
      const auto shape = entry.at("shape").get<Shape>();
      const auto offset = entry.at("offset").get<std::size_t>();
      const auto count = entry.at("count").get<std::size_t>();
      if (offset + 4 * count > declared) throw FormatError("tensor directory entry beyond payload");
      std::vector<double> values(count);
      const unsigned char* p = bytes.data() + payload_offset + offset;
      for (std::size_t i = 0; i < count; ++i) {
        values[i] = static_cast<double>(std::bit_cast<float>(get_u32(p + 4 * i)));
      }
      try {
        contents.parameters.add(entry.at("name").get<std::string>(), Tensor(shape, std::move(values)));
      } catch (const DimensionError& e) {
        throw FormatError(std::string("tensor directory: ") + e.what());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model manifest: ") + e.what());
  }
  return contents;
}

}  // namespace spectf

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

#ifndef SPECTF_MODEL_FILE_HPP_
#define SPECTF_MODEL_FILE_HPP_

// Model container (see docs/formats.md):
//
//   bytes 0..7    magic "SPTFMDL\n"
//   bytes 8..15   manifest length M, uint64 little-endian
//   next M bytes  UTF-8 JSON manifest
//   remainder     float32 little-endian tensor payload, directory order
//
// The manifest records the format version, architecture id, architecture
// config, preprocessing contract, optional decision threshold, the tensor
// directory (name, shape, byte offset, count), payload size and CRC-32.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "spectf/model_common.hpp"
#include "spectf/parameters.hpp"

namespace spectf {

inline constexpr int kModelFormatVersion = 1;

struct ModelFileContents {
  std::string architecture;  // "spectf" | "ann"
  std::string config_json;   // architecture-specific JSON object text
  Preprocessing preprocessing;
  std::optional<double> decision_threshold;
  ParameterSet parameters;
  std::uint32_t payload_crc32 = 0;
};

// Parameters are stored as float32 (values are rounded on the way out).
void write_model_file(const std::filesystem::path& path, const ModelFileContents& contents);

// Throws FormatError (bad magic / manifest), VersionError (format version),
// ChecksumError (payload size or CRC mismatch, including truncation).
ModelFileContents read_model_file(const std::filesystem::path& path);

// Cheap check of the magic bytes.
bool is_model_file(const std::filesystem::path& path);

std::string format_crc32(std::uint32_t crc);

}  // namespace spectf

#endif  // SPECTF_MODEL_FILE_HPP_

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

#ifndef SPECTF_TABLE_IO_HPP_
#define SPECTF_TABLE_IO_HPP_

// Delimited text tables.
//
// Dataset table (comma separated):
//   scene_id,label,<wavelength_1>,...,<wavelength_n>
//   synth_000,cloud,0.4123,...
// Values are written as the shortest decimal that round-trips the value's
// float32 rounding, and read back rounded to float32.
//
// Score table: a "p_cloud" header then one score per line, aligned with the
// records of a dataset table.

#include <filesystem>
#include <string>
#include <vector>

#include "spectf/dataset.hpp"

namespace spectf {

// Shortest round-trip text of static_cast<float>(v) / of v.
std::string format_float(double v);
std::string format_double(double v);

void write_dataset_table(const LabeledDataset& dataset, const std::filesystem::path& path);
// Throws FormatError on ragged rows, unknown labels, unparsable numbers.
LabeledDataset read_dataset_table(const std::filesystem::path& path);

void write_score_table(const std::vector<double>& scores, const std::filesystem::path& path);
std::vector<double> read_score_table(const std::filesystem::path& path);

}  // namespace spectf

#endif  // SPECTF_TABLE_IO_HPP_

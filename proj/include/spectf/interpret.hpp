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

#ifndef SPECTF_INTERPRET_HPP_
#define SPECTF_INTERPRET_HPP_

// Attention spectra: for each head, sum the post-softmax attention matrix
// over queries (one value per key / wavelength), then average the heads.
// Each query row sums to one, so a spectrum of n bands sums to n.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "spectf/dataset.hpp"
#include "spectf/spectf_model.hpp"

namespace spectf {

struct AttentionSpectrum {
  std::vector<double> wavelengths_nm;
  std::vector<double> values;
  std::string head_rule = "mean";
  std::string normalization = "post-softmax column sum";
  std::size_t records = 1;  // how many spectra were averaged
};

// Column sums of each head's weights, averaged over heads.
std::vector<double> attention_column_sums(const AttentionRecord& record);

AttentionSpectrum attention_spectrum(const SpecTfModel& model, std::span<const double> reflectance,
                                     std::span<const double> wavelengths_nm);
AttentionSpectrum attention_spectrum(const SpecTfModel& model, const Spectrum& spectrum);

// Elementwise mean over all records of `label`. Throws ContractError when the
// class is empty.
AttentionSpectrum mean_attention(const SpecTfModel& model, const LabeledDataset& dataset,
                                 Label label, std::size_t threads = 1);

// Tab-separated "wavelength_nm reflectance attention", one row per band,
// preceded by '#' metadata lines.
void emit_attention_overlay(std::span<const double> reflectance, const AttentionSpectrum& attention,
                            const std::filesystem::path& path);

// Two columns "wavelength_nm attention".
void write_attention_table(const AttentionSpectrum& attention, const std::filesystem::path& path);

struct OverlayRow {
  double wavelength_nm;
  double reflectance;
  double attention;
};
std::vector<OverlayRow> read_attention_overlay(const std::filesystem::path& path);

}  // namespace spectf

#endif  // SPECTF_INTERPRET_HPP_

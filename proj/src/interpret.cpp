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

#include "spectf/interpret.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include "spectf/error.hpp"
#include "spectf/parallel.hpp"
#include "spectf/table_io.hpp"

namespace spectf {

std::vector<double> attention_column_sums(const AttentionRecord& record) {
  if (record.weights.empty()) throw ContractError("attention record has no heads");
  const std::size_t n = record.weights.front().cols();
  std::vector<double> out(n, 0.0);
  for (const Tensor& w : record.weights) {
    for (std::size_t i = 0; i < w.rows(); ++i) {
      for (std::size_t j = 0; j < n; ++j) out[j] += w(i, j);
    }
  }
  const double inv_heads = 1.0 / static_cast<double>(record.weights.size());
  for (double& v : out) v *= inv_heads;
  return out;
}

AttentionSpectrum attention_spectrum(const SpecTfModel& model, std::span<const double> reflectance,
                                     std::span<const double> wavelengths_nm) {
  const SpecTfOutput out = model.forward(reflectance, wavelengths_nm, Mode::kInfer, nullptr, true);
  AttentionSpectrum s;
  s.wavelengths_nm.assign(wavelengths_nm.begin(), wavelengths_nm.end());
  s.values = attention_column_sums(*out.attention);
  return s;
}

AttentionSpectrum attention_spectrum(const SpecTfModel& model, const Spectrum& spectrum) {
  spectrum.validate();
  return attention_spectrum(model, spectrum.values, spectrum.grid.wavelengths());
}

AttentionSpectrum mean_attention(const SpecTfModel& model, const LabeledDataset& dataset,
                                 Label label, std::size_t threads) {
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (dataset.records[i].label == label) members.push_back(i);
  }
  if (members.empty()) {
    throw ContractError("no " + std::string(label_name(label)) + " records for mean attention");
  }
  const auto wavelengths = dataset.grid.wavelengths();
  std::vector<std::vector<double>> per_record(members.size());
  parallel_for(members.size(), threads, [&](std::size_t k) {
    per_record[k] = attention_spectrum(model, dataset.records[members[k]].values, wavelengths).values;
  });
  AttentionSpectrum mean;
  mean.wavelengths_nm.assign(wavelengths.begin(), wavelengths.end());
  mean.values.assign(wavelengths.size(), 0.0);
  for (const auto& v : per_record)
    for (std::size_t j = 0; j < v.size(); ++j) mean.values[j] += v[j];
  for (double& v : mean.values) v /= static_cast<double>(members.size());
  mean.records = members.size();
  return mean;
}

void emit_attention_overlay(std::span<const double> reflectance, const AttentionSpectrum& attention,
                            const std::filesystem::path& path) {
  if (reflectance.size() != attention.values.size() ||
      attention.wavelengths_nm.size() != attention.values.size()) {
    throw ContractError("attention overlay: reflectance and attention lengths differ");
  }
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "# head_rule=" << attention.head_rule << "\n# normalization=" << attention.normalization
      << "\n# records=" << attention.records << "\n";
  out << "wavelength_nm\treflectance\tattention\n";
  for (std::size_t i = 0; i < reflectance.size(); ++i) {
    out << format_double(attention.wavelengths_nm[i]) << '\t' << format_float(reflectance[i]) << '\t'
        << format_float(attention.values[i]) << '\n';
  }
  if (!out) throw FormatError("short write to " + path.string());
}

void write_attention_table(const AttentionSpectrum& attention, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "# head_rule=" << attention.head_rule << "\n# normalization=" << attention.normalization
      << "\n# records=" << attention.records << "\n";
  out << "wavelength_nm\tattention\n";
  for (std::size_t i = 0; i < attention.values.size(); ++i) {
    out << format_double(attention.wavelengths_nm[i]) << '\t' << format_float(attention.values[i])
        << '\n';
  }
  if (!out) throw FormatError("short write to " + path.string());
}

std::vector<OverlayRow> read_attention_overlay(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<OverlayRow> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::istringstream ss(line);
    OverlayRow r{};
    if (!(ss >> r.wavelength_nm >> r.reflectance >> r.attention)) {
      throw FormatError("malformed overlay row: " + line);
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace spectf

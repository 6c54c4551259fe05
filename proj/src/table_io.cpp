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

#include "spectf/table_io.hpp"

#include <charconv>
#include <fstream>
#include <string_view>

#include "spectf/error.hpp"

namespace spectf {
namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view text, const std::string& where) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw FormatError(where + ": cannot parse number '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

std::string format_float(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, static_cast<float>(v));
  return std::string(buf, r.ptr);
}

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void write_dataset_table(const LabeledDataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write dataset table " + path.string());
  out << "scene_id,label";
  for (double w : dataset.grid.wavelengths()) out << ',' << format_double(w);
  out << '\n';
  std::string line;
  for (const auto& r : dataset.records) {
    if (r.values.size() != dataset.grid.size()) {
      throw ContractError("record length does not match the dataset grid");
    }
    line.clear();
    line += r.scene_id;
    line += ',';
    line += label_name(r.label);
    for (double v : r.values) {
      line += ',';
      line += format_float(v);
    }
    line += '\n';
    out << line;
  }
  if (!out) throw FormatError("short write to " + path.string());
}

LabeledDataset read_dataset_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open dataset table " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string() + ": empty dataset table");
  const auto header = split(line, ',');
  if (header.size() < 3 || trim(header[0]) != "scene_id" || trim(header[1]) != "label") {
    throw FormatError(path.string() + ": header must start with scene_id,label");
  }
  std::vector<double> wavelengths;
  for (std::size_t i = 2; i < header.size(); ++i) {
    wavelengths.push_back(parse_number(header[i], path.string() + " header"));
  }
  LabeledDataset data;
  try {
    data.grid = BandGrid(std::move(wavelengths));
  } catch (const ContractError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (fields.size() != header.size()) {
      throw FormatError(where + ": expected " + std::to_string(header.size()) + " columns, got " +
                        std::to_string(fields.size()));
    }
    DatasetRecord rec{std::string(trim(fields[0])), parse_label(trim(fields[1])), {}};
    rec.values.reserve(fields.size() - 2);
    // Stored precision is float32, as for cube payloads.
    for (std::size_t i = 2; i < fields.size(); ++i) {
      rec.values.push_back(static_cast<float>(parse_number(fields[i], where)));
    }
    data.records.push_back(std::move(rec));
  }
  return data;
}

void write_score_table(const std::vector<double>& scores, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write score table " + path.string());
  out << "p_cloud\n";
  for (double s : scores) out << format_double(s) << '\n';
}

std::vector<double> read_score_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open score table " + path.string());
  std::string line;
  if (!std::getline(in, line) || (trim(line) != "p_cloud" && trim(line) != "score")) {
    throw FormatError(path.string() + ": score table must start with a 'p_cloud' header");
  }
  std::vector<double> scores;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    scores.push_back(parse_number(line, path.string() + ":" + std::to_string(line_no)));
  }
  return scores;
}

}  // namespace spectf

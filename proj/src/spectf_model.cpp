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

#include "spectf/spectf_model.hpp"

#include <cmath>
#include <string>

#include "json.hpp"
#include "spectf/error.hpp"
#include "spectf/rng.hpp"

namespace spectf {
namespace {

// Fixed tensor order: embed(w,b) ln1(g,b) {q,k,v}(w,b) per head, out(w,b),
// ln2(g,b), ff1(w,b), ff2(w,b), cls(w,b).
struct Layout {
  std::size_t heads;
  std::size_t embed_w() const { return 0; }
  std::size_t ln1_g() const { return 2; }
  std::size_t head(std::size_t h) const { return 4 + 6 * h; }  // q.w q.b k.w k.b v.w v.b
  std::size_t out_w() const { return 4 + 6 * heads; }
  std::size_t ln2_g() const { return out_w() + 2; }
  std::size_t ff1_w() const { return out_w() + 4; }
  std::size_t ff2_w() const { return out_w() + 6; }
  std::size_t cls_w() const { return out_w() + 8; }
  std::size_t count() const { return out_w() + 10; }
};

void check_inputs(std::span<const double> reflectance, std::span<const double> wavelengths) {
  if (reflectance.size() != wavelengths.size()) {
    throw ContractError("spectrum has " + std::to_string(reflectance.size()) + " values but " +
                        std::to_string(wavelengths.size()) + " wavelengths");
  }
  if (reflectance.empty()) throw ContractError("empty spectrum");
  for (std::size_t i = 0; i < reflectance.size(); ++i) {
    if (!std::isfinite(reflectance[i]) || !std::isfinite(wavelengths[i])) {
      throw NumericError("non-finite value in spectrum at band " + std::to_string(i));
    }
  }
}

}  // namespace

void SpecTfConfig::validate() const {
  if (heads == 0 || d_model < heads || d_model % heads != 0) {
    throw ConfigError("d_model=" + std::to_string(d_model) + " must be a positive multiple of heads=" +
                      std::to_string(heads));
  }
  if (d_model < 2) throw ConfigError("d_model must be >= 2 for layer normalization");
  if (classes != 2) throw ConfigError("only two classes (clear, cloud) are supported");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
}

std::size_t param_count(const SpecTfConfig& config) {
  config.validate();
  const std::size_t d = config.d_model;
  const std::size_t linear = d * d + d;
  return (2 * d + d)          // embedding
         + 2 * d              // layer norm 1
         + 3 * linear         // Q, K, V over all heads
         + linear             // output projection
         + 2 * d              // layer norm 2
         + 2 * linear         // feed-forward
         + (d * 2 + 2);       // classifier
}

SpecTfModel::SpecTfModel(SpecTfConfig config, ParameterSet params)
    : config_(config), params_(std::move(params)) {}

SpecTfModel SpecTfModel::build(const SpecTfConfig& config, std::uint64_t seed) {
  config.validate();
  const std::size_t d = config.d_model, dh = config.head_dim();
  Rng rng(seed);
  ParameterSet p;
  p.add("embed.weight", uniform_fan_in(2, d, rng));
  p.add("embed.bias", zeros(d));
  p.add("ln1.gain", ones(d));
  p.add("ln1.bias", zeros(d));
  for (std::size_t h = 0; h < config.heads; ++h) {
    const std::string prefix = "head" + std::to_string(h) + ".";
    for (const char* proj : {"q", "k", "v"}) {
      p.add(prefix + proj + ".weight", uniform_fan_in(d, dh, rng));
      p.add(prefix + proj + ".bias", zeros(dh));
    }
  }
  p.add("out.weight", uniform_fan_in(d, d, rng));
  p.add("out.bias", zeros(d));
  p.add("ln2.gain", ones(d));
  p.add("ln2.bias", zeros(d));
  p.add("ff1.weight", uniform_fan_in(d, d, rng));
  p.add("ff1.bias", zeros(d));
  p.add("ff2.weight", uniform_fan_in(d, d, rng));
  p.add("ff2.bias", zeros(d));
  p.add("cls.weight", uniform_fan_in(d, config.classes, rng));
  p.add("cls.bias", zeros(config.classes));
  return SpecTfModel(config, std::move(p));
}

SpecTfModel::TapeOutput SpecTfModel::forward(Tape& tape, std::span<const Var> params,
                                             std::span<const double> reflectance,
                                             std::span<const double> wavelengths_nm, Mode mode,
                                             Rng* rng, bool keep_attention) const {
  check_inputs(reflectance, wavelengths_nm);
  const Layout L{config_.heads};
  if (params.size() != L.count()) throw ContractError("parameter binding does not match the model");
  const bool dropout = mode == Mode::kTrain && config_.dropout > 0.0;
  if (dropout && rng == nullptr) throw ContractError("train-mode forward needs an RNG stream");

  const std::size_t n = reflectance.size();
  Tensor x0({n, 2});
  for (std::size_t i = 0; i < n; ++i) {
    x0(i, 0) = reflectance[i];
    x0(i, 1) = (wavelengths_nm[i] - preprocessing_.wavelength_center_nm) /
               preprocessing_.wavelength_scale_nm;
  }
  const Var input = tape.constant(std::move(x0));
  const Var x1 = ag::tanh(ag::linear(input, params[L.embed_w()], params[L.embed_w() + 1]));
  const Var x2 = ag::layer_norm(x1, params[L.ln1_g()], params[L.ln1_g() + 1]);

  TapeOutput out;
  // The per-head projections run as one [d x d] linear over concatenated
  // head weights; attention then works on column blocks.
  std::vector<Var> w[3], b[3];
  for (std::size_t h = 0; h < config_.heads; ++h) {
    for (std::size_t p = 0; p < 3; ++p) {
      w[p].push_back(params[L.head(h) + 2 * p]);
      b[p].push_back(params[L.head(h) + 2 * p + 1]);
    }
  }
  Var qkv[3];
  for (std::size_t p = 0; p < 3; ++p) {
    qkv[p] = ag::linear(x2, ag::concat_cols(w[p]), ag::concat_cols(b[p]));
  }
  std::vector<Tensor> masks;
  if (dropout) {
    for (std::size_t h = 0; h < config_.heads; ++h) {
      masks.push_back(dropout_mask({n, n}, config_.dropout, *rng));
    }
  }
  const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(config_.head_dim()));
  const Var heads = ag::multi_head_attention(
      qkv[0], qkv[1], qkv[2], config_.heads, inv_sqrt_dk, std::move(masks),
      keep_attention ? &out.attention.weights : nullptr,
      keep_attention ? &out.attention.logits : nullptr);
  const Var x3 = ag::linear(heads, params[L.out_w()], params[L.out_w() + 1]);
  const Var x4 = ag::layer_norm(x3, params[L.ln2_g()], params[L.ln2_g() + 1]);
  Var x5 = ag::gelu(ag::linear(x4, params[L.ff1_w()], params[L.ff1_w() + 1]));
  if (dropout) x5 = ag::mask(x5, dropout_mask(x5.value().shape(), config_.dropout, *rng));
  const Var x6 = ag::linear(x5, params[L.ff2_w()], params[L.ff2_w() + 1]);
  const Var x7 = ag::max_rows(x6);
  out.probabilities = ag::softmax_rows(ag::linear(x7, params[L.cls_w()], params[L.cls_w() + 1]));
  return out;
}

SpecTfOutput SpecTfModel::forward(std::span<const double> reflectance,
                                  std::span<const double> wavelengths_nm, Mode mode, Rng* rng,
                                  bool keep_attention) const {
  Tape tape(/*record=*/false);
  const auto vars = params_.bind(tape);
  TapeOutput t = forward(tape, vars, reflectance, wavelengths_nm, mode, rng, keep_attention);
  SpecTfOutput out;
  const Tensor& p = t.probabilities.value();
  out.probabilities = {p[0], p[1]};
  if (keep_attention) out.attention = std::move(t.attention);
  return out;
}

ClassProbabilities SpecTfModel::predict(std::span<const double> reflectance,
                                        std::span<const double> wavelengths_nm) const {
  return forward(reflectance, wavelengths_nm).probabilities;
}

GridPrediction SpecTfModel::predict(const Spectrum& spectrum) const {
  spectrum.validate();
  GridPrediction out;
  out.probabilities = predict(spectrum.values, spectrum.grid.wavelengths());
  if (preprocessing_.training_span && !spectrum.grid.empty()) {
    out.outside_training_span = spectrum.grid.front() < preprocessing_.training_span->lo_nm ||
                                spectrum.grid.back() > preprocessing_.training_span->hi_nm;
  }
  return out;
}

std::string spectf_config_json(const SpecTfConfig& c) {
  nlohmann::json j;
  j["d_model"] = c.d_model;
  j["heads"] = c.heads;
  j["dropout"] = c.dropout;
  j["classes"] = c.classes;
  return j.dump();
}

SpecTfConfig parse_spectf_config(std::string_view json_text) {
  SpecTfConfig c;
  try {
    const auto j = nlohmann::json::parse(json_text);
    c.d_model = j.at("d_model").get<std::size_t>();
    c.heads = j.at("heads").get<std::size_t>();
    c.dropout = j.at("dropout").get<double>();
    c.classes = j.value("classes", std::size_t{2});
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("spectf config: ") + e.what());
  }
  c.validate();
  return c;
}

SpecTfModel spectf_from_contents(const ModelFileContents& contents) {
  if (contents.architecture != "spectf") {
    throw FormatError("model architecture is '" + contents.architecture + "', expected 'spectf'");
  }
  const SpecTfConfig config = parse_spectf_config(contents.config_json);
  SpecTfModel model = SpecTfModel::build(config, 0);
  ParameterSet& params = model.parameters();
  if (contents.parameters.size() != params.size()) {
    throw FormatError("tensor directory has " + std::to_string(contents.parameters.size()) +
                      " entries, architecture needs " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (contents.parameters.name(i) != params.name(i) ||
        contents.parameters[i].shape() != params[i].shape()) {
      throw FormatError("tensor directory entry " + contents.parameters.name(i) + " " +
                        shape_to_string(contents.parameters[i].shape()) + " does not match " +
                        params.name(i) + " " + shape_to_string(params[i].shape()));
    }
    params[i] = contents.parameters[i];
  }
  model.preprocessing() = contents.preprocessing;
  model.decision_threshold = contents.decision_threshold;
  return model;
}

void save_model(const SpecTfModel& model, const std::filesystem::path& path) {
  ModelFileContents c;
  c.architecture = "spectf";
  c.config_json = spectf_config_json(model.config());
  c.preprocessing = model.preprocessing();
  c.decision_threshold = model.decision_threshold;
  c.parameters = model.parameters();
  write_model_file(path, c);
}

SpecTfModel load_spectf_model(const std::filesystem::path& path) {
  return spectf_from_contents(read_model_file(path));
}

}  // namespace spectf

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

#include "spectf/ann.hpp"

#include <cmath>

#include "json.hpp"
#include "spectf/error.hpp"
#include "spectf/rng.hpp"

namespace spectf {
namespace {

enum Slot : std::size_t {
  kResW, kResB, kResLnG, kResLnB,
  kMain1W, kMain1B, kLnAG, kLnAB,
  kMain2W, kMain2B, kLnBG, kLnBB,
  kHeadW, kHeadB, kSlotCount
};

}  // namespace

void AnnConfig::validate() const {
  if (input_bands == 0) throw ConfigError("ANN input_bands must be > 0");
  if (width < 2) throw ConfigError("ANN width must be >= 2");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("ANN dropout must lie in [0, 1)");
}

AnnLayerCounts ann_layer_counts(const AnnConfig& c) {
  c.validate();
  return {c.input_bands * c.width + c.width, c.input_bands * c.width + c.width,
          c.width * c.width + c.width, c.width * 2 + 2, 3 * 2 * c.width};
}

AnnModel::AnnModel(AnnConfig config, ParameterSet params)
    : config_(config), params_(std::move(params)) {}

AnnModel AnnModel::build(const AnnConfig& config, std::uint64_t seed) {
  config.validate();
  const std::size_t in = config.input_bands, w = config.width;
  Rng rng(seed);
  ParameterSet p;
  p.add("residual.weight", uniform_fan_in(in, w, rng));
  p.add("residual.bias", zeros(w));
  p.add("residual_ln.gain", ones(w));
  p.add("residual_ln.bias", zeros(w));
  p.add("main1.weight", uniform_fan_in(in, w, rng));
  p.add("main1.bias", zeros(w));
  p.add("main1_ln.gain", ones(w));
  p.add("main1_ln.bias", zeros(w));
  p.add("main2.weight", uniform_fan_in(w, w, rng));
  p.add("main2.bias", zeros(w));
  p.add("main2_ln.gain", ones(w));
  p.add("main2_ln.bias", zeros(w));
  p.add("head.weight", uniform_fan_in(w, 2, rng));
  p.add("head.bias", zeros(2));
  AnnModel model(config, std::move(p));
  return model;
}

Var AnnModel::forward(Tape& tape, std::span<const Var> params, Tensor batch, Mode mode,
                      Rng* rng) const {
  if (params.size() != kSlotCount) throw ContractError("parameter binding does not match the ANN");
  if (batch.rank() != 2 || batch.cols() != config_.input_bands) {
    throw ContractError("ANN expects inputs of exactly " + std::to_string(config_.input_bands) +
                        " bands, got batch " + shape_to_string(batch.shape()));
  }
  if (!batch.all_finite()) throw NumericError("non-finite value in ANN input");
  const bool dropout = mode == Mode::kTrain && config_.dropout > 0.0;
  if (dropout && rng == nullptr) throw ContractError("train-mode forward needs an RNG stream");

  const Var x = tape.constant(std::move(batch));
  const Var r = ag::layer_norm(ag::linear(x, params[kResW], params[kResB]), params[kResLnG],
                               params[kResLnB]);
  Var m = ag::gelu(ag::layer_norm(ag::linear(x, params[kMain1W], params[kMain1B]),
                                  params[kLnAG], params[kLnAB]));
  if (dropout) m = ag::mask(m, dropout_mask(m.value().shape(), config_.dropout, *rng));
  m = ag::gelu(ag::layer_norm(ag::linear(m, params[kMain2W], params[kMain2B]), params[kLnBG],
                              params[kLnBB]));
  if (dropout) m = ag::mask(m, dropout_mask(m.value().shape(), config_.dropout, *rng));
  const Var y = ag::gelu(ag::add(m, r));
  return ag::softmax_rows(ag::linear(y, params[kHeadW], params[kHeadB]));
}

ClassProbabilities AnnModel::predict(std::span<const double> reflectance) const {
  if (reflectance.size() != config_.input_bands) {
    throw ContractError("ANN expects exactly " + std::to_string(config_.input_bands) +
                        " bands, got " + std::to_string(reflectance.size()));
  }
  Tape tape(false);
  const auto vars = params_.bind(tape);
  Tensor batch({1, reflectance.size()}, std::vector<double>(reflectance.begin(), reflectance.end()));
  const Tensor& p = forward(tape, vars, std::move(batch), Mode::kInfer, nullptr).value();
  return {p[0], p[1]};
}

std::string ann_config_json(const AnnConfig& c) {
  nlohmann::json j;
  j["input_bands"] = c.input_bands;
  j["width"] = c.width;
  j["dropout"] = c.dropout;
  return j.dump();
}

AnnConfig parse_ann_config(std::string_view json_text) {
  AnnConfig c;
  try {
    const auto j = nlohmann::json::parse(json_text);
    c.input_bands = j.at("input_bands").get<std::size_t>();
    c.width = j.at("width").get<std::size_t>();
    c.dropout = j.at("dropout").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("ann config: ") + e.what());
  }
  c.validate();
  return c;
}

AnnModel ann_from_contents(const ModelFileContents& contents) {
  if (contents.architecture != "ann") {
    throw FormatError("model architecture is '" + contents.architecture + "', expected 'ann'");
  }
  const AnnConfig config = parse_ann_config(contents.config_json);
  AnnModel model = AnnModel::build(config, 0);
  ParameterSet& params = model.parameters();
  if (contents.parameters.size() != params.size()) {
    throw FormatError("tensor directory does not match the ANN architecture");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (contents.parameters.name(i) != params.name(i) ||
        contents.parameters[i].shape() != params[i].shape()) {
      throw FormatError("tensor directory entry " + contents.parameters.name(i) +
                        " does not match " + params.name(i));
    }
    params[i] = contents.parameters[i];
  }
  model.preprocessing() = contents.preprocessing;
  model.decision_threshold = contents.decision_threshold;
  return model;
}

void save_model(const AnnModel& model, const std::filesystem::path& path) {
  ModelFileContents c;
  c.architecture = "ann";
  c.config_json = ann_config_json(model.config());
  c.preprocessing = model.preprocessing();
  c.decision_threshold = model.decision_threshold;
  c.parameters = model.parameters();
  write_model_file(path, c);
}

AnnModel load_ann_model(const std::filesystem::path& path) {
  return ann_from_contents(read_model_file(path));
}

}  // namespace spectf

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

#ifndef SPECTF_SPECTF_MODEL_HPP_
#define SPECTF_SPECTF_MODEL_HPP_

// Single-layer spectroscopic transformer.
//
// Each band contributes one sequence item (reflectance, normalized
// wavelength). The dataflow is
//
//   X1 = tanh(Linear_2->d(X0))           embedding
//   X2 = LayerNorm(X1)
//   head_i = softmax(Q_i K_i^T / sqrt(d/h)) V_i,  Q_i, K_i, V_i = Linear_d->d/h(X2)
//   X3 = Linear_d->d(concat(head_1..head_h))   (no residual around attention)
//   X4 = LayerNorm(X3)
//   X6 = Linear_d->d(gelu(Linear_d->d(X4)))
//   x7 = max over items of X6
//   (p_clear, p_cloud) = softmax(Linear_d->2(x7))
//
// Dropout (train mode only) is applied to the attention weights and after
// the feed-forward gelu. Every step is per-item or symmetric in the items,
// so the output does not depend on band order.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spectf/autodiff.hpp"
#include "spectf/model_common.hpp"
#include "spectf/model_file.hpp"
#include "spectf/parameters.hpp"

namespace spectf {

class Rng;

struct SpecTfConfig {
  std::size_t d_model = 64;
  std::size_t heads = 8;
  double dropout = 0.1;
  std::size_t classes = 2;

  std::size_t head_dim() const { return d_model / heads; }
  // Throws ConfigError.
  void validate() const;
};

// Exact number of learned scalars for `config` (layer-norm affine terms and
// all biases included).
std::size_t param_count(const SpecTfConfig& config);

// Post-softmax attention weights (and the scaled logits) per head, n x n.
struct AttentionRecord {
  std::vector<Tensor> weights;
  std::vector<Tensor> logits;
};

struct SpecTfOutput {
  ClassProbabilities probabilities;
  std::optional<AttentionRecord> attention;
};

struct GridPrediction {
  ClassProbabilities probabilities;
  bool outside_training_span = false;
};

class SpecTfModel {
 public:
  // Uniform +-sqrt(1/fan_in) weights, zero biases, unit layer-norm gains.
  // Deterministic in `seed`.
  static SpecTfModel build(const SpecTfConfig& config, std::uint64_t seed);

  const SpecTfConfig& config() const { return config_; }
  const Preprocessing& preprocessing() const { return preprocessing_; }
  Preprocessing& preprocessing() { return preprocessing_; }
  const ParameterSet& parameters() const { return params_; }
  ParameterSet& parameters() { return params_; }
  std::optional<double> decision_threshold;

  // Differentiable forward pass on `tape` with `params` = parameters().bind().
  // `wavelengths_nm` are raw band centers (any order, any length n >= 1).
  // With `keep_attention` the per-head weights and logits are copied out.
  struct TapeOutput {
    Var probabilities;  // [1 x 2]
    AttentionRecord attention;
  };
  TapeOutput forward(Tape& tape, std::span<const Var> params,
                     std::span<const double> reflectance,
                     std::span<const double> wavelengths_nm, Mode mode,
                     Rng* rng, bool keep_attention = false) const;

  // Plain forward. Train mode needs `rng` for dropout.
  SpecTfOutput forward(std::span<const double> reflectance,
                       std::span<const double> wavelengths_nm, Mode mode = Mode::kInfer,
                       Rng* rng = nullptr, bool keep_attention = false) const;
  ClassProbabilities predict(std::span<const double> reflectance,
                             std::span<const double> wavelengths_nm) const;

  // Inference on a spectrum sampled on any grid: same code path as forward,
  // with a flag for grids reaching outside the training span.
  GridPrediction predict(const Spectrum& spectrum) const;

 private:
  SpecTfModel(SpecTfConfig config, ParameterSet params);

  SpecTfConfig config_;
  Preprocessing preprocessing_;
  ParameterSet params_;
};

void save_model(const SpecTfModel& model, const std::filesystem::path& path);
SpecTfModel load_spectf_model(const std::filesystem::path& path);

// Config <-> manifest JSON object text.
std::string spectf_config_json(const SpecTfConfig& config);
SpecTfConfig parse_spectf_config(std::string_view json_text);
// Rebuilds a model from a decoded container; checks architecture, config
// and the tensor directory.
SpecTfModel spectf_from_contents(const ModelFileContents& contents);

}  // namespace spectf

#endif  // SPECTF_SPECTF_MODEL_HPP_

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

#ifndef SPECTF_ANN_HPP_
#define SPECTF_ANN_HPP_

// Fixed-length residual MLP reference model:
//
//   r = LayerNorm(Linear_in->w(x))
//   m = Dropout(gelu(LayerNorm(Linear_w->w(Dropout(gelu(LayerNorm(Linear_in->w(x))))))))
//   p = softmax(Linear_w->2(gelu(m + r)))
//
// Dropout is only active in train mode. Input length is fixed at build time.

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

struct AnnConfig {
  std::size_t input_bands = 268;
  std::size_t width = 1400;
  double dropout = 0.2;

  void validate() const;
};

struct AnnLayerCounts {
  std::size_t residual_linear;
  std::size_t main_linear1;
  std::size_t main_linear2;
  std::size_t head_linear;
  std::size_t layer_norms;  // all three affine layer norms together

  std::size_t total() const {
    return residual_linear + main_linear1 + main_linear2 + head_linear + layer_norms;
  }
};

AnnLayerCounts ann_layer_counts(const AnnConfig& config);

class AnnModel {
 public:
  static AnnModel build(const AnnConfig& config, std::uint64_t seed);

  const AnnConfig& config() const { return config_; }
  const ParameterSet& parameters() const { return params_; }
  ParameterSet& parameters() { return params_; }
  const Preprocessing& preprocessing() const { return preprocessing_; }
  Preprocessing& preprocessing() { return preprocessing_; }
  std::optional<double> decision_threshold;

  // batch[B x input_bands] -> probabilities [B x 2].
  Var forward(Tape& tape, std::span<const Var> params, Tensor batch, Mode mode, Rng* rng) const;

  // Throws ContractError unless reflectance.size() == input_bands.
  ClassProbabilities predict(std::span<const double> reflectance) const;

 private:
  AnnModel(AnnConfig config, ParameterSet params);

  AnnConfig config_;
  Preprocessing preprocessing_;
  ParameterSet params_;
};

std::string ann_config_json(const AnnConfig& config);
AnnConfig parse_ann_config(std::string_view json_text);
AnnModel ann_from_contents(const ModelFileContents& contents);
void save_model(const AnnModel& model, const std::filesystem::path& path);
AnnModel load_ann_model(const std::filesystem::path& path);

}  // namespace spectf

#endif  // SPECTF_ANN_HPP_

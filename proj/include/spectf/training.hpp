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

#ifndef SPECTF_TRAINING_HPP_
#define SPECTF_TRAINING_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <vector>

#include "spectf/ann.hpp"
#include "spectf/dataset.hpp"
#include "spectf/error.hpp"
#include "spectf/metrics.hpp"
#include "spectf/spectf_model.hpp"

namespace spectf {

// -log(max(p_label, 1e-12)).
double cross_entropy(const ClassProbabilities& probs, Label label);

struct AdamWHyper {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

struct OptimizerState {
  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;
  std::uint64_t step = 0;

  static OptimizerState for_parameters(std::span<const Tensor> params);
};

// theta <- theta - lr wd theta, then the bias-corrected Adam update.
// Throws NumericError naming the first non-finite gradient entry.
void adamw_step(std::span<Tensor> params, std::span<const Tensor> grads, OptimizerState& state,
                const AdamWHyper& hyper);

struct TrainConfig {
  double learning_rate = 1e-4;
  std::size_t batch_size = 256;
  std::size_t epochs = 30;
  double weight_decay = 0.0;
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  static TrainConfig spectf_defaults() { return {}; }
  static TrainConfig ann_defaults() { return {1e-5, 1024, 30, 0.0, 0, 1}; }
  void validate() const;
};

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double validation_loss = 0.0;
  double validation_auc = 0.0;  // NaN when undefined
  double wall_seconds = 0.0;
};

struct TrainHistory {
  std::vector<EpochStats> epochs;

  // One row per epoch: epoch, train_loss, val_loss, val_auc, wall_s.
  void write(std::ostream& out) const;
};

template <typename Model>
struct TrainResult {
  Model final_model;
  Model best_model;  // highest validation AUC, earliest on ties
  std::size_t best_epoch = 0;
  TrainHistory history;
};

// Thrown when a batch loss or gradient stops being finite. Carries the
// parameters of the last completed epoch (or the initial ones).
class TrainingDiverged : public NumericError {
 public:
  TrainingDiverged(const std::string& what, ParameterSet last_good, std::size_t last_good_epoch)
      : NumericError(what), last_good(std::move(last_good)), last_good_epoch(last_good_epoch) {}
  ParameterSet last_good;
  std::size_t last_good_epoch;
};

// Called after every epoch with the current model; `is_best` marks a new
// best-validation-AUC checkpoint.
template <typename Model>
using EpochCallback = std::function<void(const Model&, const EpochStats&, bool is_best)>;

TrainResult<SpecTfModel> train(const SpecTfModel& initial, const LabeledDataset& train_set,
                               const LabeledDataset& validation_set, const TrainConfig& config,
                               const EpochCallback<SpecTfModel>& on_epoch = {});
TrainResult<AnnModel> train(const AnnModel& initial, const LabeledDataset& train_set,
                            const LabeledDataset& validation_set, const TrainConfig& config,
                            const EpochCallback<AnnModel>& on_epoch = {});

// Mean cross-entropy of records[batch[i]] and its gradient w.r.t. every
// parameter (written to `grads`, shaped like the parameters). In train mode
// sample i draws dropout from Rng::stream(dropout_seed, batch[i]).
// Accumulation order is fixed, so results do not depend on `threads`.
double batch_loss_and_gradient(const SpecTfModel& model, const LabeledDataset& data,
                               std::span<const std::size_t> batch, Mode mode,
                               std::uint64_t dropout_seed, std::vector<Tensor>& grads,
                               std::size_t threads = 1);
double batch_loss_and_gradient(const AnnModel& model, const LabeledDataset& data,
                               std::span<const std::size_t> batch, Mode mode,
                               std::uint64_t dropout_seed, std::vector<Tensor>& grads,
                               std::size_t threads = 1);

// p_cloud for every record (inference mode).
ScoredSet score_dataset(const SpecTfModel& model, const LabeledDataset& data,
                        std::size_t threads = 1);
ScoredSet score_dataset(const AnnModel& model, const LabeledDataset& data,
                        std::size_t threads = 1);

}  // namespace spectf

#endif  // SPECTF_TRAINING_HPP_

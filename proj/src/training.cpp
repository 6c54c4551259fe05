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

#include "spectf/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <string>

#include "spectf/parallel.hpp"
#include "spectf/rng.hpp"

namespace spectf {
namespace {

// Batch positions per gradient chunk. Chunks are summed in index order,
// which keeps gradients bitwise independent of the thread count.
constexpr std::size_t kSpecTfChunk = 8;
constexpr std::size_t kAnnChunk = 256;

void add_into(std::vector<Tensor>& dst, const std::vector<Tensor>& src) {
  for (std::size_t t = 0; t < dst.size(); ++t) {
    auto d = dst[t].data();
    auto s = src[t].data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
  }
}

void scale_all(std::vector<Tensor>& grads, double factor) {
  for (auto& g : grads)
    for (double& v : g.data()) v *= factor;
}

struct ChunkResult {
  double loss_sum = 0.0;
  std::vector<Tensor> grads;
};

template <typename ChunkFn>
double chunked_gradient(const ParameterSet& params, std::size_t batch_size, std::size_t chunk,
                        std::size_t threads, std::vector<Tensor>& grads, ChunkFn&& fn) {
  if (batch_size == 0) throw ContractError("empty batch");
  const std::size_t chunks = (batch_size + chunk - 1) / chunk;
  std::vector<ChunkResult> results(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    results[c].grads = params.zeros_like();
    const std::size_t begin = c * chunk;
    const std::size_t end = std::min(batch_size, begin + chunk);
    results[c].loss_sum = fn(begin, end, results[c].grads);
  });
  grads = params.zeros_like();
  double loss = 0.0;
  for (const auto& r : results) {
    add_into(grads, r.grads);
    loss += r.loss_sum;
  }
  const double inv = 1.0 / static_cast<double>(batch_size);
  scale_all(grads, inv);
  return loss * inv;
}

std::vector<ClassProbabilities> predict_all(const SpecTfModel& model, const LabeledDataset& data,
                                            std::size_t threads) {
  std::vector<ClassProbabilities> out(data.size());
  const auto wavelengths = data.grid.wavelengths();
  parallel_for(data.size(), threads, [&](std::size_t i) {
    out[i] = model.predict(data.records[i].values, wavelengths);
  });
  return out;
}

Tensor ann_batch(const LabeledDataset& data, std::span<const std::size_t> rows) {
  const std::size_t bands = data.grid.size();
  Tensor batch({rows.size(), bands});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& v = data.records.at(rows[i]).values;
    if (v.size() != bands) throw ContractError("record length does not match the dataset grid");
    std::copy(v.begin(), v.end(), batch.row(i).begin());
  }
  return batch;
}

std::vector<ClassProbabilities> predict_all(const AnnModel& model, const LabeledDataset& data,
                                            std::size_t threads) {
  std::vector<ClassProbabilities> out(data.size());
  const std::size_t chunks = (data.size() + kAnnChunk - 1) / kAnnChunk;
  parallel_for(chunks, threads, [&](std::size_t c) {
    const std::size_t begin = c * kAnnChunk, end = std::min(data.size(), begin + kAnnChunk);
    std::vector<std::size_t> rows(end - begin);
    std::iota(rows.begin(), rows.end(), begin);
    Tape tape(false);
    const auto vars = model.parameters().bind(tape);
    const Tensor& p = model.forward(tape, vars, ann_batch(data, rows), Mode::kInfer, nullptr).value();
    for (std::size_t i = 0; i < rows.size(); ++i) out[begin + i] = {p(i, 0), p(i, 1)};
  });
  return out;
}

ScoredSet to_scored(const std::vector<ClassProbabilities>& probs, const LabeledDataset& data) {
  ScoredSet set(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) set[i] = {probs[i].cloud, data.records[i].label};
  return set;
}

bool all_finite(const std::vector<Tensor>& ts) {
  return std::all_of(ts.begin(), ts.end(), [](const Tensor& t) { return t.all_finite(); });
}

template <typename Model>
TrainResult<Model> train_impl(const Model& initial, const LabeledDataset& train_set,
                              const LabeledDataset& validation_set, const TrainConfig& config,
                              const EpochCallback<Model>& on_epoch) {
  config.validate();
  if (train_set.empty()) throw ContractError("training set is empty");
  for (const LabeledDataset* set : {&train_set, &validation_set}) {
    for (std::size_t i = 0; i < set->size(); ++i) {
      const auto& v = set->records[i].values;
      if (v.size() != set->grid.size()) {
        throw ContractError("record " + std::to_string(i) + " does not match the dataset grid");
      }
      if (!std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); })) {
        throw NumericError("record " + std::to_string(i) + " contains non-finite values");
      }
    }
  }
  Model model = initial;
  ParameterSet last_good = model.parameters();
  std::size_t last_good_epoch = 0;
  OptimizerState state = OptimizerState::for_parameters(model.parameters().tensors());
  const AdamWHyper hyper{config.learning_rate, 0.9, 0.999, 1e-8, config.weight_decay};

  TrainResult<Model> result{model, model, 0, {}};
  double best_auc = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> order(train_set.size());
  std::vector<Tensor> grads;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng::stream(config.seed, epoch, 0x5348u).shuffle(std::span<std::size_t>(order));

    double loss_total = 0.0;
    std::size_t batch_no = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size, ++batch_no) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      const std::span<const std::size_t> batch(order.data() + begin, end - begin);
      const std::uint64_t dropout_seed = mix64(config.seed ^ mix64(epoch) ^ mix64(~batch_no));
      char msg[256];
      double loss = 0.0;
      try {
        loss = batch_loss_and_gradient(model, train_set, batch, Mode::kTrain, dropout_seed, grads,
                                       config.threads);
      } catch (const NumericError& e) {
        // Overflowed parameters trip the forward-pass checks first.
        std::snprintf(msg, sizeof msg, "training diverged at epoch %zu batch %zu (%s)", epoch,
                      batch_no, e.what());
        throw TrainingDiverged(msg, last_good, last_good_epoch);
      }
      if (!std::isfinite(loss) || !all_finite(grads)) {
        std::snprintf(msg, sizeof msg, "training diverged at epoch %zu batch %zu (loss %g)", epoch,
                      batch_no, loss);
        throw TrainingDiverged(msg, last_good, last_good_epoch);
      }
      adamw_step(model.parameters().tensors(), grads, state, hyper);
      loss_total += loss * static_cast<double>(batch.size());
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_total / static_cast<double>(train_set.size());
    stats.validation_loss = std::numeric_limits<double>::quiet_NaN();
    stats.validation_auc = std::numeric_limits<double>::quiet_NaN();
    if (!validation_set.empty()) {
      const auto probs = predict_all(model, validation_set, config.threads);
      double val_loss = 0.0;
      for (std::size_t i = 0; i < probs.size(); ++i) {
        val_loss += cross_entropy(probs[i], validation_set.records[i].label);
      }
      stats.validation_loss = val_loss / static_cast<double>(probs.size());
      try {
        stats.validation_auc = roc_auc(to_scored(probs, validation_set));
      } catch (const UndefinedMetricError&) {
      }
    }
    stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const bool is_best = result.best_epoch == 0 ||
                         (std::isfinite(stats.validation_auc) && stats.validation_auc > best_auc);
    if (is_best) {
      best_auc = std::isfinite(stats.validation_auc) ? stats.validation_auc : best_auc;
      result.best_model = model;
      result.best_epoch = epoch;
    }
    last_good = model.parameters();
    last_good_epoch = epoch;
    result.history.epochs.push_back(stats);
    if (on_epoch) on_epoch(model, stats, is_best);
  }
  result.final_model = std::move(model);
  return result;
}

}  // namespace

double cross_entropy(const ClassProbabilities& probs, Label label) {
  const double p = label == Label::kCloud ? probs.cloud : probs.clear;
  return -std::log(std::max(p, kProbabilityFloor));
}

OptimizerState OptimizerState::for_parameters(std::span<const Tensor> params) {
  OptimizerState s;
  for (const auto& p : params) {
    s.first_moment.emplace_back(p.shape());
    s.second_moment.emplace_back(p.shape());
  }
  return s;
}

void adamw_step(std::span<Tensor> params, std::span<const Tensor> grads, OptimizerState& state,
                const AdamWHyper& h) {
  if (params.size() != grads.size() || params.size() != state.first_moment.size()) {
    throw ContractError("adamw_step: parameter, gradient and state counts differ");
  }
  for (std::size_t t = 0; t < params.size(); ++t) {
    if (params[t].shape() != grads[t].shape() || params[t].shape() != state.first_moment[t].shape()) {
      throw DimensionError("adamw_step: shape mismatch for tensor " + std::to_string(t) + ": " +
                           shape_to_string(params[t].shape()) + " vs " +
                           shape_to_string(grads[t].shape()));
    }
    for (std::size_t i = 0; i < grads[t].size(); ++i) {
      if (!std::isfinite(grads[t][i])) {
        throw NumericError("adamw_step: non-finite gradient in tensor " + std::to_string(t) +
                           " at index " + std::to_string(i) + " (step " +
                           std::to_string(state.step + 1) + ")");
      }
    }
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(h.beta1, t);
  const double c2 = 1.0 - std::pow(h.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto p = params[k].data();
    auto g = grads[k].data();
    auto m = state.first_moment[k].data();
    auto v = state.second_moment[k].data();
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] -= h.learning_rate * h.weight_decay * p[i];
      m[i] = h.beta1 * m[i] + (1.0 - h.beta1) * g[i];
      v[i] = h.beta2 * v[i] + (1.0 - h.beta2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      p[i] -= h.learning_rate * m_hat / (std::sqrt(v_hat) + h.eps);
    }
  }
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
  if (batch_size == 0) throw ConfigError("batch size must be >= 1");
  if (epochs == 0) throw ConfigError("epochs must be >= 1");
  if (!(weight_decay >= 0.0)) throw ConfigError("weight decay must be >= 0");
}

void TrainHistory::write(std::ostream& out) const {
  out << "epoch\ttrain_loss\tval_loss\tval_auc\twall_s\n";
  char buf[192];
  for (const auto& e : epochs) {
    std::snprintf(buf, sizeof buf, "%zu\t%.10f\t%.10f\t%.10f\t%.3f\n", e.epoch, e.train_loss,
                  e.validation_loss, e.validation_auc, e.wall_seconds);
    out << buf;
  }
}

double batch_loss_and_gradient(const SpecTfModel& model, const LabeledDataset& data,
                               std::span<const std::size_t> batch, Mode mode,
                               std::uint64_t dropout_seed, std::vector<Tensor>& grads,
                               std::size_t threads) {
  const auto wavelengths = data.grid.wavelengths();
  return chunked_gradient(
      model.parameters(), batch.size(), kSpecTfChunk, threads, grads,
      [&](std::size_t begin, std::size_t end, std::vector<Tensor>& acc) {
        double loss = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
          const DatasetRecord& rec = data.records.at(batch[i]);
          Tape tape;
          const auto vars = model.parameters().bind(tape);
          Rng rng = Rng::stream(dropout_seed, batch[i]);
          const auto out = model.forward(tape, vars, rec.values, wavelengths, mode, &rng);
          const int label = static_cast<int>(rec.label);
          const Var nll = ag::mean_nll(out.probabilities, std::span<const int>(&label, 1));
          tape.backward(nll);
          loss += nll.value()[0];
          for (std::size_t t = 0; t < vars.size(); ++t) {
            const Tensor& g = tape.adjoint(vars[t].id());
            if (g.empty()) continue;
            auto d = acc[t].data();
            auto s = g.data();
            for (std::size_t j = 0; j < d.size(); ++j) d[j] += s[j];
          }
        }
        return loss;
      });
}

double batch_loss_and_gradient(const AnnModel& model, const LabeledDataset& data,
                               std::span<const std::size_t> batch, Mode mode,
                               std::uint64_t dropout_seed, std::vector<Tensor>& grads,
                               std::size_t threads) {
  return chunked_gradient(
      model.parameters(), batch.size(), kAnnChunk, threads, grads,
      [&](std::size_t begin, std::size_t end, std::vector<Tensor>& acc) {
        const auto rows = batch.subspan(begin, end - begin);
        std::vector<int> labels;
        for (std::size_t r : rows) labels.push_back(static_cast<int>(data.records.at(r).label));
        Tape tape;
        const auto vars = model.parameters().bind(tape);
        Rng rng = Rng::stream(dropout_seed, begin);
        const Var probs = model.forward(tape, vars, ann_batch(data, rows), mode, &rng);
        // mean_nll averages over the chunk; rescale to a sum.
        const Var nll = ag::scale(ag::mean_nll(probs, labels), static_cast<double>(rows.size()));
        tape.backward(nll);
        for (std::size_t t = 0; t < vars.size(); ++t) {
          const Tensor& g = tape.adjoint(vars[t].id());
          if (g.empty()) continue;
          auto d = acc[t].data();
          auto s = g.data();
          for (std::size_t j = 0; j < d.size(); ++j) d[j] += s[j];
        }
        return nll.value()[0];
      });
}

ScoredSet score_dataset(const SpecTfModel& model, const LabeledDataset& data, std::size_t threads) {
  return to_scored(predict_all(model, data, threads), data);
}

ScoredSet score_dataset(const AnnModel& model, const LabeledDataset& data, std::size_t threads) {
  return to_scored(predict_all(model, data, threads), data);
}

TrainResult<SpecTfModel> train(const SpecTfModel& initial, const LabeledDataset& train_set,
                               const LabeledDataset& validation_set, const TrainConfig& config,
                               const EpochCallback<SpecTfModel>& on_epoch) {
  return train_impl(initial, train_set, validation_set, config, on_epoch);
}

TrainResult<AnnModel> train(const AnnModel& initial, const LabeledDataset& train_set,
                            const LabeledDataset& validation_set, const TrainConfig& config,
                            const EpochCallback<AnnModel>& on_epoch) {
  return train_impl(initial, train_set, validation_set, config, on_epoch);
}

}  // namespace spectf

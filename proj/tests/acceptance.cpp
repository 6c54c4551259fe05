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

// Acceptance suite: one PASS/FAIL line per criterion, then a summary.
//
//   acceptance [--expect-fail N[,N...]] [--threads T] [--only N[,N...]]
//
// Exit status is 0 when every criterion passes, or when the set of failing
// criteria is exactly the --expect-fail set. An expected failure that
// passes is reported and makes the run fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "spectf/ann.hpp"
#include "spectf/baseline.hpp"
#include "spectf/dataset.hpp"
#include "spectf/gradcheck.hpp"
#include "spectf/inference.hpp"
#include "spectf/interpret.hpp"
#include "spectf/metrics.hpp"
#include "spectf/rng.hpp"
#include "spectf/spectf_model.hpp"
#include "spectf/synth.hpp"
#include "spectf/training.hpp"

using namespace spectf;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  int id;
  std::string title;
  bool pass;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

std::vector<double> random_wavelengths(std::size_t n, Rng& rng) {
  std::vector<double> w(n);
  double at = 400.0;
  const double step = 2000.0 / static_cast<double>(n);
  for (double& x : w) {
    x = at + rng.uniform(0.05, 0.95) * step;
    at += step;
  }
  return w;
}

std::vector<double> random_reflectance(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(0.0, 1.0);
  return v;
}

void perturb(ParameterSet& params, double scale, Rng& rng) {
  for (Tensor& t : params.tensors())
    for (double& v : t.data()) v += scale * rng.normal();
}

// ---------------------------------------------------------------------------
// 1. Gradient correctness

Outcome criterion_gradients() {
  const auto start = Clock::now();
  Rng rng(101);
  SpecTfConfig cfg;
  cfg.d_model = 8;
  cfg.heads = 2;
  SpecTfModel model = SpecTfModel::build(cfg, 102);
  perturb(model.parameters(), 0.1, rng);

  LabeledDataset batch;
  batch.grid = BandGrid(random_wavelengths(12, rng));
  for (int i = 0; i < 4; ++i) {
    batch.records.push_back({"b", i % 2 ? Label::kCloud : Label::kClear, random_reflectance(12, rng)});
  }
  const std::vector<std::size_t> rows{0, 1, 2, 3};

  double worst_all = 0.0, worst_checked = 0.0, worst_zero_analytic = 0.0, worst_zero_numeric = 0.0;
  std::string worst_name;
  for (Mode mode : {Mode::kInfer, Mode::kTrain}) {
    std::vector<Tensor> analytic;
    batch_loss_and_gradient(model, batch, rows, mode, 103, analytic);
    auto loss = [&] {
      std::vector<Tensor> scratch;
      return batch_loss_and_gradient(model, batch, rows, mode, 103, scratch);
    };
    std::vector<Tensor*> all_ptrs, checked_ptrs, zero_ptrs;
    std::vector<Tensor> checked, zero;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
      Tensor* p = &model.parameters()[i];
      all_ptrs.push_back(p);
      // A key bias shifts a whole logit row, which softmax ignores.
      if (model.parameters().name(i).ends_with(".k.bias")) {
        zero_ptrs.push_back(p);
        zero.push_back(analytic[i]);
        for (double g : analytic[i].data()) worst_zero_analytic = std::max(worst_zero_analytic, std::fabs(g));
      } else {
        checked_ptrs.push_back(p);
        checked.push_back(analytic[i]);
        names.push_back(model.parameters().name(i));
      }
    }
    worst_all = std::max(worst_all, finite_difference_check(loss, all_ptrs, analytic).max_relative_error);
    const auto r = finite_difference_check(loss, checked_ptrs, checked);
    if (r.max_relative_error >= worst_checked) {
      worst_checked = r.max_relative_error;
      worst_name = names[r.worst_tensor];
    }
    // With analytic values near zero the relative error reads |numeric| / 1e-8.
    const auto z = finite_difference_check(loss, zero_ptrs, zero);
    worst_zero_numeric = std::max(worst_zero_numeric, std::fabs(z.worst_numeric));
  }
  const double elapsed = seconds_since(start);
  const bool pass = worst_checked < 1e-4 && worst_zero_analytic <= 1e-12 &&
                    worst_zero_numeric <= 1e-8 && elapsed < 60.0;
  return {1, "gradient correctness", pass,
          fmt("d_model 8, 2 heads, n 12, batch 4, h 1e-5, infer and train mode: max rel err %.2e "
              "(worst %s) over all non-structural coordinates; key-bias gradients |analytic| %.1e, "
              "|numeric| %.1e (softmax shift invariance); all-coordinate rel err %.2e; %.1f s",
              worst_checked, worst_name.c_str(), worst_zero_analytic, worst_zero_numeric, worst_all,
              elapsed)};
}

// ---------------------------------------------------------------------------
// 2. Permutation invariance

Outcome criterion_permutation() {
  Rng rng(201);
  std::vector<SpecTfModel> models;
  for (std::uint64_t s = 0; s < 4; ++s) {
    models.push_back(SpecTfModel::build(SpecTfConfig{}, 202 + s));
    perturb(models.back().parameters(), 0.05, rng);
  }
  double worst = 0.0;
  for (int pair = 0; pair < 1000; ++pair) {
    const SpecTfModel& m = models[static_cast<std::size_t>(pair) % models.size()];
    const std::size_t n = 1 + rng.below(300);
    const auto rho = random_reflectance(n, rng);
    const auto w = random_wavelengths(n, rng);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(perm));
    std::vector<double> rho_p(n), w_p(n);
    for (std::size_t i = 0; i < n; ++i) {
      rho_p[i] = rho[perm[i]];
      w_p[i] = w[perm[i]];
    }
    const ClassProbabilities a = m.predict(rho, w), b = m.predict(rho_p, w_p);
    worst = std::max({worst, std::fabs(a.clear - b.clear), std::fabs(a.cloud - b.cloud)});
  }
  return {2, "permutation invariance", worst < 1e-9,
          fmt("1000 random (spectrum, permutation) pairs, n in [1, 300], default config: "
              "max per-class deviation %.2e (< 1e-9)",
              worst)};
}

// ---------------------------------------------------------------------------
// 3. Architecture fidelity

Outcome criterion_architecture() {
  const std::size_t closed = param_count(SpecTfConfig{});
  const std::size_t allocated = SpecTfModel::build(SpecTfConfig{}, 1).parameters().scalar_count();
  const AnnLayerCounts c = ann_layer_counts(AnnConfig{});
  const bool pass = closed == 25538 && allocated == closed && closed >= 20000 && closed <= 30000 &&
                    c.residual_linear == 376600 && c.main_linear1 == 376600 &&
                    c.main_linear2 == 1961400 && c.head_linear == 2802;
  return {3, "architecture fidelity", pass,
          fmt("SpecTf param_count %zu (closed form 25538, allocated %zu, in [2e4, 3e4]); ANN "
              "layers %zu / %zu / %zu / %zu (expected 376600 / 376600 / 1961400 / 2802)",
              closed, allocated, c.residual_linear, c.main_linear1, c.main_linear2, c.head_linear)};
}

// ---------------------------------------------------------------------------
// 4, 5, 8, 9: trained on the synthetic corpus

struct Corpus {
  SynthConfig config;
  std::vector<LabeledScene> scenes;
  LabeledDataset full_train, full_val;  // native grid
  LabeledDataset train, val;            // after the exclusion windows
  std::set<std::string> val_scenes;
};

Corpus make_corpus(const SynthConfig& config, std::size_t per_class, std::uint64_t seed) {
  Corpus c;
  c.config = config;
  c.scenes = synth_generate(config, seed);
  const LabeledDataset all = sample_dataset(c.scenes, per_class, seed);
  std::tie(c.full_train, c.full_val) = split_by_scene(all, 0.25, seed);
  const auto windows = emit_exclusion_windows();
  c.train = band_mask(c.full_train, windows);
  c.val = band_mask(c.full_val, windows);
  for (const auto& id : c.full_val.scene_ids()) c.val_scenes.insert(id);
  return c;
}

struct Trained {
  Corpus corpus;
  TrainResult<SpecTfModel> result;
  double seconds = 0.0;
};

constexpr std::uint64_t kCorpusSeed = 7;
constexpr std::size_t kPerClass = 40;

TrainConfig acceptance_train_config(std::size_t threads) {
  TrainConfig t;
  t.learning_rate = 1e-4;
  t.batch_size = 32;
  t.epochs = 8;
  t.seed = kCorpusSeed;
  t.threads = threads;
  return t;
}

Trained train_on_default_corpus(std::size_t threads) {
  const auto start = Clock::now();
  Corpus corpus = make_corpus(SynthConfig{}, kPerClass, kCorpusSeed);
  SpecTfModel init = SpecTfModel::build(SpecTfConfig{}, kCorpusSeed);
  init.preprocessing().training_span =
      Window{corpus.train.grid.wavelengths().front(), corpus.train.grid.wavelengths().back()};
  auto result = train(init, corpus.train, corpus.val, acceptance_train_config(threads),
                      [](const SpecTfModel&, const EpochStats& s, bool) {
                        std::printf("    epoch %zu: train loss %.5f, val loss %.5f, val AUC %.6f, %.1f s\n",
                                    s.epoch, s.train_loss, s.validation_loss, s.validation_auc,
                                    s.wall_seconds);
                        std::fflush(stdout);
                      });
  return {std::move(corpus), std::move(result), seconds_since(start)};
}

ScoredSet baseline_scores(const LabeledDataset& data) {
  const BaselineClassifier bc(data.grid);
  ScoredSet s;
  for (const auto& r : data.records) {
    s.push_back({bc.classify(r.values) == Label::kCloud ? 1.0 : 0.0, r.label});
  }
  return s;
}

Outcome criterion_end_to_end(const Trained& t) {
  const SpecTfModel& m = t.result.final_model;
  const double auc = roc_auc(score_dataset(m, t.corpus.val, 0));
  const double base = roc_auc(baseline_scores(t.corpus.val));
  const double best_auc = roc_auc(score_dataset(t.result.best_model, t.corpus.val, 0));
  const bool pass = t.corpus.scenes.size() >= 20 && t.corpus.val_scenes.size() >= 1 && auc >= 0.98 &&
                    auc > base && t.seconds < 600.0;
  return {4, "synthetic end-to-end", pass,
          fmt("%zu scenes (%zu held out), %zu train / %zu val records, %zu bands; final-model val "
              "AUC %.6f (best epoch %zu: %.6f) vs four-band baseline AUC %.6f; %.1f s total",
              t.corpus.scenes.size(), t.corpus.val_scenes.size(), t.corpus.train.size(),
              t.corpus.val.size(), t.corpus.train.grid.size(), auc, t.result.best_epoch, best_auc,
              base, t.seconds)};
}

Outcome criterion_cross_grid(const Trained& t) {
  const SpecTfModel& m = t.result.final_model;
  const BandGrid target = aviris_ng_like_grid();
  const auto& windows = m.preprocessing().exclusion_windows;
  ScoredSet scored;
  std::vector<double> shifts;
  bool outside = false;
  std::size_t bands = 0;
  for (std::size_t i = 0; i < t.corpus.full_val.size(); ++i) {
    const auto& r = t.corpus.full_val.records[i];
    const Spectrum resampled{resample_linear(r.values, t.corpus.full_val.grid, target), target};
    const Spectrum masked = band_mask(resampled, windows);
    bands = masked.grid.size();
    const GridPrediction p = m.predict(masked);
    outside = outside || p.outside_training_span;
    scored.push_back({p.probabilities.cloud, r.label});
    const double native = m.predict(t.corpus.val.records[i].values, t.corpus.val.grid.wavelengths()).cloud;
    shifts.push_back(std::fabs(p.probabilities.cloud - native));
  }
  std::nth_element(shifts.begin(), shifts.begin() + shifts.size() / 2, shifts.end());
  const double auc = roc_auc(scored);
  return {5, "cross-grid generalization", auc >= 0.90,
          fmt("held-out records resampled to the %zu-band grid (%zu bands after the model's "
              "exclusion windows): AUC %.6f (>= 0.90); median |p_cloud shift| vs native grid %.2e; "
              "outside-training-span flag %s",
              target.size(), bands, auc, shifts[shifts.size() / 2], outside ? "raised" : "not raised")};
}

Outcome criterion_attention(const Trained& t) {
  const SpecTfModel& m = t.result.final_model;
  const LabeledDataset& val = t.corpus.val;
  double worst_sum = 0.0;
  for (const auto& r : val.records) {
    const auto s = attention_spectrum(m, r.values, val.grid.wavelengths());
    const double total = std::accumulate(s.values.begin(), s.values.end(), 0.0);
    worst_sum = std::max(worst_sum, std::fabs(total - static_cast<double>(s.values.size())));
  }
  const AttentionSpectrum cloud = mean_attention(m, val, Label::kCloud, 0);
  const AttentionSpectrum clear = mean_attention(m, val, Label::kClear, 0);
  const double feature_nm = t.corpus.config.features.front().center_nm;
  const std::size_t feature = nearest_band(val.grid, feature_nm);
  auto peak = [](const AttentionSpectrum& s) {
    return static_cast<std::size_t>(std::max_element(s.values.begin(), s.values.end()) - s.values.begin());
  };
  const std::size_t pc = peak(cloud), pl = peak(clear);
  const std::size_t distance = pc > feature ? pc - feature : feature - pc;
  const bool pass = distance <= 2 && worst_sum <= 1e-6;
  return {8, "interpretability smoke test", pass,
          fmt("cloud-class mean attention (%zu records) peaks at %.2f nm (%.3f), %zu bands from the "
              "%.0f nm feature band %.3f nm (attention there %.3f, allowed distance 2); clear-class "
              "peak %.2f nm; max |sum - n| over %zu inputs %.1e",
              cloud.records, cloud.wavelengths_nm[pc], cloud.values[pc], distance, feature_nm,
              val.grid[feature], cloud.values[feature], clear.wavelengths_nm[pl], val.size(), worst_sum)};
}

Outcome criterion_determinism(const Trained& t, std::size_t threads) {
  const auto start = Clock::now();
  // (a) two seeded end-to-end runs on a reduced corpus.
  SynthConfig small;
  small.scenes = 6;
  small.lines = 12;
  small.samples = 12;
  TrainConfig tc = acceptance_train_config(threads);
  tc.epochs = 2;
  auto run = [&] {
    const Corpus c = make_corpus(small, 12, 901);
    return train(SpecTfModel::build(SpecTfConfig{}, 902), c.train, c.val, tc);
  };
  const auto r1 = run(), r2 = run();
  bool same_history = r1.history.epochs.size() == r2.history.epochs.size();
  for (std::size_t e = 0; same_history && e < r1.history.epochs.size(); ++e) {
    const auto &a = r1.history.epochs[e], &b = r2.history.epochs[e];
    same_history = a.train_loss == b.train_loss && a.validation_loss == b.validation_loss &&
                   (a.validation_auc == b.validation_auc ||
                    (std::isnan(a.validation_auc) && std::isnan(b.validation_auc)));
  }
  bool same_params = true;
  for (std::size_t i = 0; i < r1.final_model.parameters().size(); ++i) {
    same_params = same_params && r1.final_model.parameters()[i] == r2.final_model.parameters()[i];
  }

  // (b) save / load of the trained model.
  const SpecTfModel& m = t.result.final_model;
  const fs::path dir = fs::temp_directory_path() / ("spectf_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  save_model(m, dir / "model.bin");
  const SpecTfModel back = load_spectf_model(dir / "model.bin");
  double worst = 0.0;
  for (const auto& r : t.corpus.val.records) {
    const auto a = m.predict(r.values, t.corpus.val.grid.wavelengths());
    const auto b = back.predict(r.values, t.corpus.val.grid.wavelengths());
    worst = std::max({worst, std::fabs(a.clear - b.clear), std::fabs(a.cloud - b.cloud)});
  }

  // (c) scene prediction under different thread counts.
  const LabeledScene* scene = nullptr;
  for (const auto& s : t.corpus.scenes)
    if (t.corpus.val_scenes.count(s.id)) scene = &s;
  const LoadedModel loaded = LoadedModel::load(dir / "model.bin");
  const ScenePrediction p1 = predict_scene(loaded, scene->cube, 0.5, 1);
  const ScenePrediction p4 = predict_scene(loaded, scene->cube, 0.5, 4);
  const ScenePrediction p3 = predict_scene(loaded, scene->cube, 0.5, 3);
  const bool stable_mask = p1.mask.values == p4.mask.values && p1.mask.values == p3.mask.values;
  bool stable_prob = true;
  for (std::size_t i = 0; i < p1.probability.values.size(); ++i) {
    stable_prob = stable_prob &&
                  std::memcmp(&p1.probability.values[i], &p4.probability.values[i], sizeof(double)) == 0;
  }
  fs::remove_all(dir);
  const bool pass = same_history && same_params && worst < 1e-6 && stable_mask && stable_prob;
  return {9, "determinism and persistence", pass,
          fmt("two seeded runs: histories %s, final parameters %s; save/load max output change "
              "%.2e over %zu records (< 1e-6); %s masks with 1, 3 and 4 threads %s (%zu pixels); "
              "%.1f s",
              same_history ? "identical" : "DIFFER", same_params ? "identical" : "DIFFER", worst,
              t.corpus.val.size(), scene->id.c_str(),
              stable_mask && stable_prob ? "bitwise identical" : "DIFFER", scene->cube.pixels(),
              seconds_since(start))};
}

// ---------------------------------------------------------------------------
// 6. Metric oracles

double pairwise_auc(const ScoredSet& set) {
  double wins = 0.0, pairs = 0.0;
  for (const auto& p : set) {
    if (p.label != Label::kCloud) continue;
    for (const auto& n : set) {
      if (n.label != Label::kClear) continue;
      pairs += 1.0;
      wins += p.score > n.score ? 1.0 : p.score == n.score ? 0.5 : 0.0;
    }
  }
  return wins / pairs;
}

Outcome criterion_metrics() {
  Rng rng(601);
  double worst_auc = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    ScoredSet set;
    const std::size_t n = 2 + rng.below(199);
    const bool coarse = trial % 2 == 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Label l = i == 0 ? Label::kCloud : i == 1 ? Label::kClear
                                                      : (rng.bernoulli(0.4) ? Label::kCloud : Label::kClear);
      double s = coarse ? static_cast<double>(rng.below(11)) / 10.0 : rng.uniform();
      if (!coarse && l == Label::kCloud) s = std::min(1.0, s + 0.2);
      set.push_back({s, l});
    }
    worst_auc = std::max(worst_auc, std::fabs(roc_auc(set) - pairwise_auc(set)));
  }
  int agree = 0;
  for (int trial = 0; trial < 20; ++trial) {
    ScoredSet set;
    const std::size_t n = 20 + rng.below(180);
    for (std::size_t i = 0; i < n; ++i) {
      const Label l = rng.bernoulli(0.5) ? Label::kCloud : Label::kClear;
      const std::uint64_t k = rng.below(7000) + (l == Label::kCloud ? 3000 : 0);
      set.push_back({static_cast<double>(k) / 10000.0, l});
    }
    set.push_back({0.5, Label::kCloud});
    set.push_back({0.5, Label::kClear});
    double best = -1.0, at = 0.0;
    for (int k = 0; k <= 10000; ++k) {
      const double th = k / 10000.0;
      const ConfusionCounts c = confusion(set, th);
      const double f = c.tp + c.fp + c.fn == 0 ? 0.0 : f_beta(c, 1.0);
      if (f > best) {
        best = f;
        at = th;
      }
    }
    const ThresholdChoice sweep = best_threshold(set);
    const ConfusionCounts a = confusion(set, sweep.threshold), b = confusion(set, at);
    if (std::fabs(sweep.score - best) <= 1e-12 && a.tp == b.tp && a.fp == b.fp) ++agree;
  }
  return {6, "metric oracle equivalence", worst_auc <= 1e-9 && agree == 20,
          fmt("100 sets of <= 200 records: max |trapezoid - pairwise| %.2e (<= 1e-9); "
              "best_threshold agrees with a 1e-4 grid search (F1 and confusion counts) on %d / 20 sets",
              worst_auc, agree)};
}

// ---------------------------------------------------------------------------
// 7. Table consistency

Outcome criterion_table() {
  const double recall = 0.944, f1 = 0.952;
  const double implied_precision = f1 * recall / (2.0 * recall - f1);
  const double recomputed = f_beta(0.960, recall, 1.0);
  return {7, "reported F1 consistency", std::fabs(recomputed - f1) <= 0.001,
          fmt("precision implied by recall 0.944 and F1 0.952 is %.4f; F1 from (0.960, 0.944) = "
              "%.6f, |diff| %.2e (<= 0.001)",
              implied_precision, recomputed, std::fabs(recomputed - f1))};
}

std::set<int> parse_ids(const std::string& text) {
  std::set<int> out;
  std::size_t at = 0;
  while (at < text.size()) {
    const std::size_t comma = text.find(',', at);
    const std::string part = text.substr(at, comma == std::string::npos ? std::string::npos : comma - at);
    if (!part.empty()) out.insert(std::stoi(part));
    if (comma == std::string::npos) break;
    at = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria 1-9"};
  std::string expect_fail_text, only_text;
  std::size_t threads = 0;
  app.add_option("--expect-fail", expect_fail_text, "Criteria known to fail, e.g. 8");
  app.add_option("--only", only_text, "Run only these criteria");
  app.add_option("--threads", threads, "Worker threads, 0 = all cores");
  CLI11_PARSE(app, argc, argv);
  const std::set<int> expect_fail = parse_ids(expect_fail_text);
  const std::set<int> only = parse_ids(only_text);
  auto wanted = [&](int id) { return only.empty() || only.count(id) > 0; };

  std::vector<Outcome> outcomes;
  auto report = [&](Outcome o) {
    std::printf("criterion %d %s: %s\n    %s\n", o.id, o.pass ? "PASS" : "FAIL", o.title.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
    outcomes.push_back(std::move(o));
  };

  if (wanted(1)) report(criterion_gradients());
  if (wanted(2)) report(criterion_permutation());
  if (wanted(3)) report(criterion_architecture());
  if (wanted(6)) report(criterion_metrics());
  if (wanted(7)) report(criterion_table());
  if (wanted(4) || wanted(5) || wanted(8) || wanted(9)) {
    std::printf("training on the default synthetic corpus...\n");
    std::fflush(stdout);
    const Trained trained = train_on_default_corpus(threads);
    if (wanted(4)) report(criterion_end_to_end(trained));
    if (wanted(5)) report(criterion_cross_grid(trained));
    if (wanted(8)) report(criterion_attention(trained));
    if (wanted(9)) report(criterion_determinism(trained, threads));
  }

  std::sort(outcomes.begin(), outcomes.end(), [](const Outcome& a, const Outcome& b) { return a.id < b.id; });
  std::set<int> failed;
  std::printf("\nsummary:");
  for (const auto& o : outcomes) {
    std::printf(" %d:%s", o.id, o.pass ? "PASS" : "FAIL");
    if (!o.pass) failed.insert(o.id);
  }
  std::printf("\n");
  bool ok = true;
  for (int id : failed) {
    if (!expect_fail.count(id)) ok = false;
  }
  for (int id : expect_fail) {
    if (!wanted(id)) continue;
    if (!failed.count(id)) {
      std::printf("criterion %d was expected to fail but passed; update the expectation\n", id);
      ok = false;
    } else {
      std::printf("criterion %d fails as expected (known failure, see README)\n", id);
    }
  }
  std::printf("%zu / %zu criteria pass\n", outcomes.size() - failed.size(), outcomes.size());
  return ok ? 0 : 1;
}

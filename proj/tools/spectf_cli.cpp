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

// spectf: batch command-line front end.
//
// Exit codes: 0 success, 1 usage, 2 data / format / config error or an
// undefined metric, 3 numeric failure (non-finite values, divergence).

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spectf/ann.hpp"
#include "spectf/baseline.hpp"
#include "spectf/cube_io.hpp"
#include "spectf/dataset.hpp"
#include "spectf/error.hpp"
#include "spectf/inference.hpp"
#include "spectf/interpret.hpp"
#include "spectf/metrics.hpp"
#include "spectf/model_file.hpp"
#include "spectf/spectf_model.hpp"
#include "spectf/synth.hpp"
#include "spectf/table_io.hpp"
#include "spectf/training.hpp"

namespace fs = std::filesystem;
using namespace spectf;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::optional<double> parse_double(const std::string& text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

fs::path with_suffix(const fs::path& p, const std::string& suffix) {
  fs::path out = p;
  out += suffix;
  return out;
}

bool is_raster(const fs::path& p) { return fs::exists(sidecar_path(p)); }

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  fs::path data;
  std::string val = "0.13";
  std::string arch = "spectf";
  std::size_t epochs = 30;
  std::optional<double> lr;
  std::optional<std::size_t> batch;
  double weight_decay = 0.0;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  std::size_t width = 1400;
  fs::path out;
};

template <typename Model>
double pick_threshold(const Model& model, const LabeledDataset& val, std::size_t threads) {
  if (val.empty()) return 0.5;
  try {
    return best_threshold(score_dataset(model, val, threads)).threshold;
  } catch (const UndefinedMetricError&) {
    return 0.5;
  }
}

template <typename Model>
int finish_training(TrainResult<Model> result, const LabeledDataset& val, const TrainArgs& a,
                    const Preprocessing& prep) {
  for (Model* m : {&result.final_model, &result.best_model}) {
    m->preprocessing() = prep;
    m->decision_threshold = pick_threshold(*m, val, a.threads);
  }
  save_model(result.final_model, a.out);
  save_model(result.best_model, with_suffix(a.out, ".best"));
  std::ofstream hist(with_suffix(a.out, ".history.tsv"));
  result.history.write(hist);
  const EpochStats& last = result.history.epochs.back();
  std::printf("trained %zu epochs: train_loss %.6f val_auc %.6f; best epoch %zu\n",
              result.history.epochs.size(), last.train_loss, last.validation_auc,
              result.best_epoch);
  std::printf("wrote %s (threshold %.6g), %s.best, %s.history.tsv\n", a.out.c_str(),
              *result.final_model.decision_threshold, a.out.c_str(), a.out.c_str());
  return kExitOk;
}

int run_train(const TrainArgs& a) {
  const LabeledDataset table = read_dataset_table(a.data);
  LabeledDataset train_set, val_set;
  if (const auto fraction = parse_double(a.val); fraction && !fs::exists(a.val)) {
    if (*fraction == 0.0) {
      train_set = table;
      val_set.grid = table.grid;
    } else {
      std::tie(train_set, val_set) = split_by_scene(table, *fraction, a.seed);
    }
  } else {
    train_set = table;
    val_set = read_dataset_table(a.val);
    if (!(val_set.grid == table.grid)) throw FormatError("validation table uses a different grid");
  }

  Preprocessing prep;
  train_set = band_mask(train_set, prep.exclusion_windows);
  val_set = band_mask(val_set, prep.exclusion_windows);
  prep.training_span = Window{train_set.grid.wavelengths().front(),
                              train_set.grid.wavelengths().back()};
  std::printf("%zu training records (%zu scenes), %zu validation records, %zu bands\n",
              train_set.size(), train_set.scene_ids().size(), val_set.size(),
              train_set.grid.size());

  TrainConfig cfg = a.arch == "ann" ? TrainConfig::ann_defaults() : TrainConfig::spectf_defaults();
  cfg.epochs = a.epochs;
  if (a.lr) cfg.learning_rate = *a.lr;
  if (a.batch) cfg.batch_size = *a.batch;
  cfg.weight_decay = a.weight_decay;
  cfg.seed = a.seed;
  cfg.threads = a.threads;

  auto report = [](const auto&, const EpochStats& s, bool best) {
    std::printf("epoch %3zu  train_loss %.6f  val_loss %.6f  val_auc %.6f  %.1fs%s\n", s.epoch,
                s.train_loss, s.validation_loss, s.validation_auc, s.wall_seconds,
                best ? "  *" : "");
    std::fflush(stdout);
  };
  if (a.arch == "spectf") {
    const SpecTfModel init = SpecTfModel::build(SpecTfConfig{}, a.seed);
    return finish_training(train(init, train_set, val_set, cfg, report), val_set, a, prep);
  }
  AnnConfig ac;
  ac.input_bands = train_set.grid.size();
  ac.width = a.width;
  const AnnModel init = AnnModel::build(ac, a.seed);
  return finish_training(train(init, train_set, val_set, cfg, report), val_set, a, prep);
}

// ---------------------------------------------------------------------------
// predict

struct PredictArgs {
  fs::path model;
  fs::path cube;
  std::string threshold = "auto";
  fs::path out_mask;
  fs::path out_prob;
  std::size_t threads = 0;
};

int run_predict(const PredictArgs& a) {
  const LoadedModel model = LoadedModel::load(a.model);
  double threshold = 0.5;
  if (a.threshold == "auto") {
    if (model.decision_threshold()) threshold = *model.decision_threshold();
    else std::fprintf(stderr, "note: model has no decision threshold, using 0.5\n");
  } else if (const auto t = parse_double(a.threshold)) {
    threshold = *t;
  } else {
    throw UsageError("--threshold must be a number or 'auto'");
  }
  const SpectralCube cube = read_cube(a.cube);
  if (const auto& span = model.preprocessing().training_span) {
    const BandGrid kept = band_mask(cube.grid, model.preprocessing().exclusion_windows).grid;
    if (kept.front() < span->lo_nm || kept.back() > span->hi_nm) {
      std::fprintf(stderr, "warning: cube covers %g - %g nm, outside the training span %g - %g nm\n",
                   kept.front(), kept.back(), span->lo_nm, span->hi_nm);
    }
  }
  const ScenePrediction pred = predict_scene(model, cube, threshold, a.threads);
  write_mask(pred.mask, a.out_mask);
  if (!a.out_prob.empty()) write_probability_map(pred.probability, a.out_prob);
  const auto cloud = std::count(pred.mask.values.begin(), pred.mask.values.end(), kMaskCloud);
  std::printf("%zu pixels: %td cloud, %zu no-data (threshold %.6g)\n", cube.pixels(), cloud,
              pred.no_data_pixels, threshold);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  fs::path scores;
  fs::path data;
  fs::path cube;
  fs::path labels;
  fs::path report;
  fs::path roc;
  std::optional<double> threshold;
  std::string name;
  std::size_t threads = 0;
};

int run_eval(const EvalArgs& a) {
  ScoredSet set;
  std::optional<std::size_t> params;
  std::string column = a.name;
  if (is_model_file(a.scores)) {
    const LoadedModel model = LoadedModel::load(a.scores);
    params = model.parameter_count();
    if (column.empty()) column = model.architecture() == "spectf" ? "SpecTf" : "ANN";
    if (!a.data.empty()) {
      set = score_table(model, read_dataset_table(a.data), a.threads);
    } else if (!a.cube.empty() && !a.labels.empty()) {
      const ScenePrediction pred = predict_scene(model, read_cube(a.cube), 0.5, a.threads);
      set = pair_with_labels(pred.probability, read_mask(a.labels));
    } else {
      throw UsageError("scoring a model needs --data, or --cube and --labels");
    }
  } else if (is_raster(a.scores)) {
    if (a.labels.empty()) throw UsageError("a probability raster needs --labels");
    set = pair_with_labels(read_probability_map(a.scores), read_mask(a.labels));
  } else {
    if (a.data.empty()) throw UsageError("a score table needs --data");
    const std::vector<double> scores = read_score_table(a.scores);
    const LabeledDataset data = read_dataset_table(a.data);
    if (scores.size() != data.size()) {
      throw FormatError("score table has " + std::to_string(scores.size()) + " rows for " +
                        std::to_string(data.size()) + " records");
    }
    for (std::size_t i = 0; i < scores.size(); ++i) set.push_back({scores[i], data.records[i].label});
  }
  if (column.empty()) column = "scores";

  const DetectionReport report = detection_report(set, a.threshold, params);
  if (a.report.empty()) {
    write_report(std::cout, report, column);
  } else {
    std::ofstream out(a.report);
    if (!out) throw FormatError("cannot write " + a.report.string());
    write_report(out, report, column);
    std::printf("ROC AUC %.6f over %zu records; report written to %s\n", report.auc, set.size(),
                a.report.c_str());
  }
  if (!a.roc.empty()) {
    std::ofstream out(a.roc);
    write_roc_points(out, roc_curve(set));
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// baseline

struct BaselineArgs {
  fs::path cube;
  fs::path out_mask;
  BaselineThresholds t;
};

int run_baseline(const BaselineArgs& a) {
  MaskRaster mask = baseline_scene(read_cube(a.cube), a.t);
  write_mask(mask, a.out_mask);
  const auto cloud = std::count(mask.values.begin(), mask.values.end(), kMaskCloud);
  std::printf("%zu pixels: %td cloud\n", mask.values.size(), cloud);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// attention

struct AttentionArgs {
  fs::path model;
  fs::path input;
  std::vector<std::size_t> pixel;
  std::size_t record = 0;
  bool mean_by_class = false;
  fs::path out;
  std::size_t threads = 0;
};

int run_attention(const AttentionArgs& a) {
  const LoadedModel loaded = LoadedModel::load(a.model);
  const SpecTfModel* model = loaded.spectf();
  if (!model) throw ConfigError("attention spectra need a spectf model, not " + loaded.architecture());
  const auto& windows = model->preprocessing().exclusion_windows;

  if (is_raster(a.input)) {
    if (a.pixel.size() != 2) throw UsageError("a cube input needs --pixel LINE,SAMPLE");
    SpectralCube cube = read_cube(a.input);
    if (a.pixel[0] >= cube.lines || a.pixel[1] >= cube.samples) {
      throw UsageError("--pixel lies outside the cube");
    }
    convert_to_reflectance(cube);
    const SpectralCube masked = band_mask(cube, windows);
    const auto px = masked.pixel(a.pixel[0] * cube.samples + a.pixel[1]);
    emit_attention_overlay(px, attention_spectrum(*model, px, masked.grid.wavelengths()), a.out);
    std::printf("wrote overlay for pixel (%zu, %zu) to %s\n", a.pixel[0], a.pixel[1], a.out.c_str());
    return kExitOk;
  }

  const LabeledDataset data = band_mask(read_dataset_table(a.input), windows);
  if (a.mean_by_class) {
    for (Label label : {Label::kClear, Label::kCloud}) {
      const fs::path path = with_suffix(a.out, "." + std::string(label_name(label)) + ".tsv");
      const AttentionSpectrum mean = mean_attention(*model, data, label, a.threads);
      write_attention_table(mean, path);
      std::printf("wrote %s mean over %zu records to %s\n", std::string(label_name(label)).c_str(),
                  mean.records, path.c_str());
    }
    return kExitOk;
  }
  if (a.record >= data.size()) throw UsageError("--record lies outside the table");
  const auto& values = data.records[a.record].values;
  emit_attention_overlay(values, attention_spectrum(*model, values, data.grid.wavelengths()), a.out);
  std::printf("wrote overlay for record %zu to %s\n", a.record, a.out.c_str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  fs::path config;
  std::uint64_t seed = 0;
  fs::path out_dir;
  double val_fraction = 0.13;
};

int run_synth(const SynthArgs& a) {
  const SynthConfig cfg = a.config.empty() ? SynthConfig{} : load_synth_config(a.config);
  const auto scenes = synth_generate(cfg, a.seed);
  fs::create_directories(a.out_dir);
  for (const auto& s : scenes) {
    write_cube(s.cube, a.out_dir / (s.id + ".raw"));
    write_mask(MaskRaster{s.cube.lines, s.cube.samples, s.labels, std::nullopt, ""},
               a.out_dir / (s.id + ".labels.raw"));
  }
  const LabeledDataset all = sample_dataset(scenes, cfg.samples_per_class, a.seed);
  write_dataset_table(all, a.out_dir / "dataset.csv");
  const auto [train_set, val_set] = split_by_scene(all, a.val_fraction, a.seed);
  write_dataset_table(train_set, a.out_dir / "train.csv");
  write_dataset_table(val_set, a.out_dir / "val.csv");
  std::ofstream(a.out_dir / "config.json") << synth_config_json(cfg) << '\n';
  std::printf("%zu scenes, %zu records (%zu train / %zu val) in %s\n", scenes.size(), all.size(),
              train_set.size(), val_set.size(), a.out_dir.c_str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// info

int run_info(const fs::path& path) {
  const LoadedModel model = LoadedModel::load(path);
  const Preprocessing& p = model.preprocessing();
  std::printf("architecture      %s\n", model.architecture().c_str());
  std::printf("config            %s\n", model.config_json().c_str());
  std::printf("param_count       %zu\n", model.parameter_count());
  std::printf("checksum          %s\n", model.checksum().c_str());
  if (model.decision_threshold()) {
    std::printf("threshold         %.17g\n", *model.decision_threshold());
  } else {
    std::printf("threshold         none\n");
  }
  std::printf("wavelength norm   center %g nm, scale %g nm\n", p.wavelength_center_nm,
              p.wavelength_scale_nm);
  std::printf("excluded windows ");
  for (const Window& w : p.exclusion_windows) std::printf(" [%g, %g]", w.lo_nm, w.hi_nm);
  std::printf("\n");
  if (p.training_span) {
    std::printf("training span     %g - %g nm\n", p.training_span->lo_nm, p.training_span->hi_nm);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SpecTf cloud screening for imaging spectroscopy"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  TrainArgs ta;
  auto* train_cmd = app.add_subcommand("train", "Train a model on a dataset table");
  train_cmd->add_option("--data", ta.data, "Training dataset table")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--val", ta.val, "Validation table, or a scene fraction split off --data")
      ->capture_default_str();
  train_cmd->add_option("--arch", ta.arch)->check(CLI::IsMember({"spectf", "ann"}))->capture_default_str();
  train_cmd->add_option("--epochs", ta.epochs)->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--lr", ta.lr, "Learning rate (default 1e-4 spectf, 1e-5 ann)");
  train_cmd->add_option("--batch", ta.batch, "Batch size (default 256 spectf, 1024 ann)");
  train_cmd->add_option("--wd", ta.weight_decay, "AdamW weight decay")->capture_default_str();
  train_cmd->add_option("--seed", ta.seed)->capture_default_str();
  train_cmd->add_option("--threads", ta.threads, "0 = all cores")->capture_default_str();
  train_cmd->add_option("--width", ta.width, "ANN hidden width")->capture_default_str();
  train_cmd->add_option("--out", ta.out, "Model path; also writes <out>.best and <out>.history.tsv")
      ->required();

  PredictArgs pa;
  auto* predict_cmd = app.add_subcommand("predict", "Cloud mask for one cube");
  predict_cmd->add_option("--model", pa.model)->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--cube", pa.cube)->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--threshold", pa.threshold, "Number, or 'auto' for the model's own")
      ->capture_default_str();
  predict_cmd->add_option("--out-mask", pa.out_mask)->required();
  predict_cmd->add_option("--out-prob", pa.out_prob, "Optional probability raster");
  predict_cmd->add_option("--threads", pa.threads, "0 = all cores")->capture_default_str();

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("eval", "Detection report for scores against labels");
  eval_cmd->add_option("--scores", ea.scores, "Model file, score table or probability raster")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--data", ea.data, "Labeled dataset table")->check(CLI::ExistingFile);
  eval_cmd->add_option("--cube", ea.cube, "Cube to score with a model")->check(CLI::ExistingFile);
  eval_cmd->add_option("--labels", ea.labels, "Label raster")->check(CLI::ExistingFile);
  eval_cmd->add_option("--report", ea.report, "Report path (default stdout)");
  eval_cmd->add_option("--roc", ea.roc, "Optional ROC point table");
  eval_cmd->add_option("--threshold", ea.threshold, "Binary threshold (default best F1)");
  eval_cmd->add_option("--name", ea.name, "Report column name");
  eval_cmd->add_option("--threads", ea.threads, "0 = all cores")->capture_default_str();

  BaselineArgs ba;
  auto* baseline_cmd = app.add_subcommand("baseline", "Four-band threshold cloud mask");
  baseline_cmd->add_option("--cube", ba.cube)->required()->check(CLI::ExistingFile);
  baseline_cmd->add_option("--out-mask", ba.out_mask)->required();
  baseline_cmd->add_option("--t450", ba.t.t450)->capture_default_str();
  baseline_cmd->add_option("--t1250", ba.t.t1250)->capture_default_str();
  baseline_cmd->add_option("--t1650", ba.t.t1650)->capture_default_str();
  baseline_cmd->add_option("--t1380", ba.t.t1380)->capture_default_str();

  AttentionArgs aa;
  auto* attention_cmd = app.add_subcommand("attention", "Export attention spectra");
  attention_cmd->add_option("--model", aa.model)->required()->check(CLI::ExistingFile);
  attention_cmd->add_option("--input", aa.input, "Dataset table or cube")
      ->required()
      ->check(CLI::ExistingFile);
  attention_cmd->add_option("--pixel", aa.pixel, "LINE,SAMPLE for a cube input")->delimiter(',');
  attention_cmd->add_option("--record", aa.record, "Table row for a single overlay")
      ->capture_default_str();
  attention_cmd->add_flag("--mean-by-class", aa.mean_by_class,
                          "Write <out>.clear.tsv and <out>.cloud.tsv class means");
  attention_cmd->add_option("--out", aa.out)->required();
  attention_cmd->add_option("--threads", aa.threads, "0 = all cores")->capture_default_str();

  SynthArgs sa;
  auto* synth_cmd = app.add_subcommand("synth", "Generate labeled synthetic scenes");
  synth_cmd->add_option("--config", sa.config, "JSON config (default built-in)")
      ->check(CLI::ExistingFile);
  synth_cmd->add_option("--seed", sa.seed)->capture_default_str();
  synth_cmd->add_option("--out-dir", sa.out_dir)->required();
  synth_cmd->add_option("--val-fraction", sa.val_fraction, "Scene fraction written to val.csv")
      ->capture_default_str();

  fs::path info_model;
  auto* info_cmd = app.add_subcommand("info", "Describe a model file");
  info_cmd->add_option("--model", info_model)->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train_cmd) return run_train(ta);
    if (*predict_cmd) return run_predict(pa);
    if (*eval_cmd) return run_eval(ea);
    if (*baseline_cmd) return run_baseline(ba);
    if (*attention_cmd) return run_attention(aa);
    if (*synth_cmd) return run_synth(sa);
    if (*info_cmd) return run_info(info_model);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const UndefinedMetricError& e) {
    std::fprintf(stderr, "error: undefined metric: %s\n", e.what());
    return kExitData;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
  return kExitUsage;
}

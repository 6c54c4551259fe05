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

#ifndef SPECTF_METRICS_HPP_
#define SPECTF_METRICS_HPP_

// Binary detection metrics with cloud as the positive class. A record is
// predicted cloud when score >= threshold.

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "spectf/dataset.hpp"

namespace spectf {

struct ScoredRecord {
  double score;  // p_cloud
  Label label;
};

using ScoredSet = std::vector<ScoredRecord>;

struct ConfusionCounts {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  double tpr() const;  // recall
  double fpr() const;
  double precision() const;
};

ConfusionCounts confusion(const ScoredSet& set, double threshold);

struct RocPoint {
  double fpr;
  double tpr;
  double threshold;  // score >= threshold predicts cloud
};

struct RocCurve {
  std::vector<RocPoint> points;  // from (0, 0) to (1, 1)
  double auc = 0.0;
};

// Sweeps every distinct score (descending) and integrates by trapezoids, so
// tied scores earn half credit. Throws UndefinedMetricError unless both
// classes are present.
RocCurve roc_curve(const ScoredSet& set);
inline double roc_auc(const ScoredSet& set) { return roc_curve(set).auc; }

// (1 + beta^2) P R / (beta^2 P + R). Zero when TP = 0 but some error exists;
// UndefinedMetricError when TP = FP = FN = 0.
double f_beta(const ConfusionCounts& counts, double beta);
double f_beta(double precision, double recall, double beta);

struct ThresholdChoice {
  double threshold;
  double score;
};

// Maximizes F_beta over {0, 1} and every distinct score; ties resolve to the
// lowest threshold.
ThresholdChoice best_threshold(const ScoredSet& set, double beta = 1.0);

struct DetectionReport {
  double threshold;
  ConfusionCounts counts;
  double auc;
  double f1, f05, f025, f01;
  std::optional<std::size_t> learned_params;
};

// Binary metrics are taken at `threshold` if given, else at the best-F1
// threshold.
DetectionReport detection_report(const ScoredSet& set, std::optional<double> threshold = {},
                                 std::optional<std::size_t> learned_params = {});

// Table with rows TPR, FPR, ROC AUC, F1.0, F0.5, F0.25, F0.1, Binary Thresh.,
// Learned Params.
void write_report(std::ostream& out, const DetectionReport& report, const std::string& column);
void write_roc_points(std::ostream& out, const RocCurve& curve);

}  // namespace spectf

#endif  // SPECTF_METRICS_HPP_

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

#include "spectf/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <string>

#include "spectf/error.hpp"

namespace spectf {
namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void require_both_classes(const ScoredSet& set, const char* metric) {
  bool pos = false, neg = false;
  for (const auto& r : set) (r.label == Label::kCloud ? pos : neg) = true;
  if (!pos || !neg) {
    throw UndefinedMetricError(std::string(metric) +
                               " is undefined unless both clear and cloud records are present");
  }
}

std::string fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

double ConfusionCounts::tpr() const { return ratio(tp, tp + fn); }
double ConfusionCounts::fpr() const { return ratio(fp, fp + tn); }
double ConfusionCounts::precision() const { return ratio(tp, tp + fp); }

ConfusionCounts confusion(const ScoredSet& set, double threshold) {
  ConfusionCounts c;
  for (const auto& r : set) {
    const bool predicted = r.score >= threshold;
    if (r.label == Label::kCloud) {
      (predicted ? c.tp : c.fn)++;
    } else {
      (predicted ? c.fp : c.tn)++;
    }
  }
  return c;
}

RocCurve roc_curve(const ScoredSet& set) {
  require_both_classes(set, "ROC AUC");
  std::vector<ScoredRecord> sorted = set;
  std::sort(sorted.begin(), sorted.end(),
            [](const ScoredRecord& a, const ScoredRecord& b) { return a.score > b.score; });
  std::size_t positives = 0;
  for (const auto& r : sorted) positives += r.label == Label::kCloud;
  const std::size_t negatives = sorted.size() - positives;

  RocCurve curve;
  curve.points.push_back({0.0, 0.0, sorted.front().score + 1.0});
  std::size_t tp = 0, fp = 0;
  double area = 0.0;  // in units of (count x count), normalized at the end
  for (std::size_t i = 0; i < sorted.size();) {
    const double s = sorted[i].score;
    std::size_t dtp = 0, dfp = 0;
    for (; i < sorted.size() && sorted[i].score == s; ++i) {
      (sorted[i].label == Label::kCloud ? dtp : dfp)++;
    }
    area += static_cast<double>(dfp) * (static_cast<double>(tp) + 0.5 * static_cast<double>(dtp));
    tp += dtp;
    fp += dfp;
    curve.points.push_back({ratio(fp, negatives), ratio(tp, positives), s});
  }
  curve.auc = area / (static_cast<double>(positives) * static_cast<double>(negatives));
  return curve;
}

double f_beta(double precision, double recall, double beta) {
  if (!(beta > 0.0)) throw ContractError("beta must be > 0");
  const double b2 = beta * beta;
  const double den = b2 * precision + recall;
  if (den == 0.0) return 0.0;
  return (1.0 + b2) * precision * recall / den;
}

double f_beta(const ConfusionCounts& c, double beta) {
  if (!(beta > 0.0)) throw ContractError("beta must be > 0");
  if (c.tp == 0 && c.fp == 0 && c.fn == 0) {
    throw UndefinedMetricError("F-beta is undefined with no positives and no predictions");
  }
  if (c.tp == 0) return 0.0;
  return f_beta(c.precision(), c.tpr(), beta);
}

ThresholdChoice best_threshold(const ScoredSet& set, double beta) {
  require_both_classes(set, "best F-beta threshold");
  std::vector<double> pos, neg;
  for (const auto& r : set) (r.label == Label::kCloud ? pos : neg).push_back(r.score);
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());

  std::vector<double> candidates = {0.0, 1.0};
  for (const auto& r : set) candidates.push_back(r.score);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  auto at_or_above = [](const std::vector<double>& v, double t) {
    return static_cast<std::size_t>(v.end() - std::lower_bound(v.begin(), v.end(), t));
  };
  ThresholdChoice best{candidates.front(), -1.0};
  for (double t : candidates) {
    ConfusionCounts c;
    c.tp = at_or_above(pos, t);
    c.fn = pos.size() - c.tp;
    c.fp = at_or_above(neg, t);
    c.tn = neg.size() - c.fp;
    const double f = f_beta(c, beta);
    if (f > best.score) best = {t, f};
  }
  return best;
}

DetectionReport detection_report(const ScoredSet& set, std::optional<double> threshold,
                                 std::optional<std::size_t> learned_params) {
  DetectionReport r;
  r.threshold = threshold ? *threshold : best_threshold(set, 1.0).threshold;
  r.counts = confusion(set, r.threshold);
  r.auc = roc_auc(set);
  r.f1 = f_beta(r.counts, 1.0);
  r.f05 = f_beta(r.counts, 0.5);
  r.f025 = f_beta(r.counts, 0.25);
  r.f01 = f_beta(r.counts, 0.1);
  r.learned_params = learned_params;
  return r;
}

void write_report(std::ostream& out, const DetectionReport& r, const std::string& column) {
  auto row = [&](const std::string& name, const std::string& value) {
    out << name << '\t' << value << '\n';
  };
  row("Metric", column);
  row("TPR", fmt(r.counts.tpr()));
  row("FPR", fmt(r.counts.fpr()));
  row("ROC AUC", fmt(r.auc));
  row("F1.0", fmt(r.f1));
  row("F0.5", fmt(r.f05));
  row("F0.25", fmt(r.f025));
  row("F0.1", fmt(r.f01));
  row("Binary Thresh.", ">= " + fmt(r.threshold, 4));
  row("Learned Params.", r.learned_params ? std::to_string(*r.learned_params) : "N/A");
  // Full-precision values for machine consumers.
  out << "# auc_exact\t" << fmt(r.auc, 17) << '\n';
  out << "# counts\tTP=" << r.counts.tp << " FP=" << r.counts.fp << " TN=" << r.counts.tn
      << " FN=" << r.counts.fn << '\n';
}

void write_roc_points(std::ostream& out, const RocCurve& curve) {
  out << "fpr\ttpr\n";
  for (const auto& p : curve.points) out << fmt(p.fpr, 9) << '\t' << fmt(p.tpr, 9) << '\n';
}

}  // namespace spectf

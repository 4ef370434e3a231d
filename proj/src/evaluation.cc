// Copyright 2026 The Praisetag Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "praisetag/evaluation.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "praisetag/error.h"

namespace praisetag {
namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

LabelReport label_report(const Counts& counts) {
  return {scores_from(counts), counts, counts.tp + counts.fn};
}

void check_tau(double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "tau must be in (0, 1], got " + std::to_string(tau));
  }
}

std::size_t overlap(const EntitySpan& a, const EntitySpan& b) {
  const std::size_t lo = std::max(a.token_start, b.token_start);
  const std::size_t hi = std::min(a.token_end, b.token_end);
  return hi > lo ? hi - lo : 0;
}

}  // namespace

Scores scores_from(const Counts& counts) {
  Scores s;
  s.precision = ratio(counts.tp, counts.tp + counts.fp);
  s.recall = ratio(counts.tp, counts.tp + counts.fn);
  s.f1 = harmonic(s.precision, s.recall);
  return s;
}

MetricCounts& MetricCounts::operator+=(const MetricCounts& other) {
  for (std::size_t i = 0; i < per_label.size(); ++i) per_label[i] += other.per_label[i];
  if (other.outside) {
    if (!outside) outside = Counts{};
    *outside += *other.outside;
  }
  return *this;
}

MetricReport MetricCounts::report() const {
  MetricReport report;
  for (EntityLabel label : kAllLabels) report.per_label[label] = label_report(at(label));
  for (EntityLabel label : kScoredLabels) report.counts += at(label);
  if (outside) {
    report.outside = label_report(*outside);
    report.counts += *outside;
  }
  report.micro = scores_from(report.counts);
  for (EntityLabel label : kScoredLabels) {
    const Scores& s = report.per_label[label].scores;
    report.macro.precision += s.precision / kScoredLabels.size();
    report.macro.recall += s.recall / kScoredLabels.size();
    report.macro.f1 += s.f1 / kScoredLabels.size();
  }
  return report;
}

MetricCounts token_counts(std::span<const BioTag> gold, std::span<const BioTag> pred,
                          bool exclude_outside) {
  if (gold.size() != pred.size()) {
    throw Error(ErrorCode::kLengthMismatch, "gold has " + std::to_string(gold.size()) +
                                                " tags, prediction " + std::to_string(pred.size()));
  }
  MetricCounts counts;
  if (!exclude_outside) counts.outside = Counts{};

  auto bucket = [&counts](const BioTag& tag) -> Counts& {
    return tag.is_outside() ? *counts.outside : counts.at(*tag.label());
  };

  for (std::size_t i = 0; i < gold.size(); ++i) {
    const BioTag& g = gold[i];
    const BioTag& p = pred[i];
    if (g.is_outside() && p.is_outside()) {
      if (!exclude_outside) ++counts.outside->tp;
      continue;
    }
    if (g == p) {
      ++bucket(g).tp;
      continue;
    }
    if (!p.is_outside() || !exclude_outside) ++bucket(p).fp;
    if (!g.is_outside() || !exclude_outside) ++bucket(g).fn;
  }
  return counts;
}

MetricReport token_metrics(std::span<const BioTag> gold, std::span<const BioTag> pred,
                           bool exclude_outside) {
  return token_counts(gold, pred, exclude_outside).report();
}

MetricCounts span_exact_counts(const std::vector<EntitySpan>& gold,
                               const std::vector<EntitySpan>& pred) {
  MetricCounts counts;
  std::vector<bool> used(gold.size(), false);
  for (const auto& p : pred) {
    bool matched = false;
    for (std::size_t g = 0; g < gold.size() && !matched; ++g) {
      if (!used[g] && gold[g].same_extent(p)) {
        used[g] = true;
        matched = true;
      }
    }
    if (matched) {
      ++counts.at(p.label).tp;
    } else {
      ++counts.at(p.label).fp;
    }
  }
  for (std::size_t g = 0; g < gold.size(); ++g) {
    if (!used[g]) ++counts.at(gold[g].label).fn;
  }
  return counts;
}

MetricReport span_exact_metrics(const std::vector<EntitySpan>& gold,
                                const std::vector<EntitySpan>& pred) {
  return span_exact_counts(gold, pred).report();
}

double span_iou(const EntitySpan& a, const EntitySpan& b) {
  if (a.label != b.label) return 0.0;
  const std::size_t inter = overlap(a, b);
  const std::size_t uni = a.length() + b.length() - inter;
  return ratio(inter, uni);
}

MetricCounts partial_counts(const std::vector<EntitySpan>& gold,
                            const std::vector<EntitySpan>& pred, double tau) {
  check_tau(tau);
  struct Candidate {
    double iou;
    std::size_t gold;
    std::size_t pred;
  };
  std::vector<Candidate> candidates;
  for (std::size_t g = 0; g < gold.size(); ++g) {
    for (std::size_t p = 0; p < pred.size(); ++p) {
      const double iou = span_iou(gold[g], pred[p]);
      if (iou > 0.0 && iou >= tau) candidates.push_back({iou, g, p});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(b.iou, a.gold, a.pred) < std::tie(a.iou, b.gold, b.pred);
  });

  MetricCounts counts;
  std::vector<bool> gold_used(gold.size(), false);
  std::vector<bool> pred_used(pred.size(), false);
  for (const auto& c : candidates) {
    if (gold_used[c.gold] || pred_used[c.pred]) continue;
    gold_used[c.gold] = pred_used[c.pred] = true;
    ++counts.at(gold[c.gold].label).tp;
  }
  for (std::size_t p = 0; p < pred.size(); ++p) {
    if (!pred_used[p]) ++counts.at(pred[p].label).fp;
  }
  for (std::size_t g = 0; g < gold.size(); ++g) {
    if (!gold_used[g]) ++counts.at(gold[g].label).fn;
  }
  return counts;
}

MetricReport partial_metrics(const std::vector<EntitySpan>& gold,
                             const std::vector<EntitySpan>& pred, double tau) {
  return partial_counts(gold, pred, tau).report();
}

std::string_view case_category_name(CaseCategory category) {
  switch (category) {
    case CaseCategory::kAccurate: return "Accurate";
    case CaseCategory::kInaccurate: return "Inaccurate";
    case CaseCategory::kPartiallyAccurate: return "PartiallyAccurate";
    case CaseCategory::kAccurateNone: return "AccurateNone";
  }
  return "Inaccurate";
}

CaseCategory categorize_case(const std::vector<EntitySpan>& gold,
                             const std::vector<EntitySpan>& pred, double tau) {
  check_tau(tau);
  if (gold.empty() && pred.empty()) return CaseCategory::kAccurateNone;

  auto extents = [](const std::vector<EntitySpan>& spans) {
    std::vector<std::tuple<std::size_t, std::size_t, EntityLabel>> out;
    for (const auto& s : spans) out.emplace_back(s.token_start, s.token_end, s.label);
    std::sort(out.begin(), out.end());
    return out;
  };
  if (extents(gold) == extents(pred)) return CaseCategory::kAccurate;

  const MetricCounts partial = partial_counts(gold, pred, tau);
  std::size_t matched = 0;
  for (const auto& c : partial.per_label) matched += c.tp;
  return matched > 0 ? CaseCategory::kPartiallyAccurate : CaseCategory::kInaccurate;
}

ClassificationReport classification_metrics(std::span<const PraiseLabels> gold,
                                            std::span<const PraiseLabels> pred) {
  if (gold.empty()) throw Error(ErrorCode::kEmptyInput, "classification needs at least one item");
  if (gold.size() != pred.size()) {
    throw Error(ErrorCode::kLengthMismatch, "gold and prediction label lists differ in length");
  }
  auto flag = [](const PraiseLabels& labels, EntityLabel label) {
    switch (label) {
      case EntityLabel::kEffort: return labels.effort;
      case EntityLabel::kOutcome: return labels.outcome;
      case EntityLabel::kPerson: return labels.person;
    }
    return false;
  };

  ClassificationReport report;
  for (EntityLabel label : kScoredLabels) {
    BinaryConfusion c;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      const bool g = flag(gold[i], label);
      const bool p = flag(pred[i], label);
      if (g && p) ++c.tp;
      else if (!g && p) ++c.fp;
      else if (g && !p) ++c.fn;
      else ++c.tn;
    }
    BinaryReport r;
    r.confusion = c;
    r.accuracy = ratio(c.tp + c.tn, c.tp + c.fp + c.fn + c.tn);
    r.precision = ratio(c.tp, c.tp + c.fp);
    r.recall = ratio(c.tp, c.tp + c.fn);
    r.f1 = harmonic(r.precision, r.recall);
    report.per_label[label] = r;
  }
  return report;
}

RunAggregate aggregate_runs(std::span<const double> values, std::string name) {
  if (values.empty()) throw Error(ErrorCode::kEmptyInput, "no runs to aggregate for " + name);
  RunAggregate out;
  out.metric_name = std::move(name);
  out.values.assign(values.begin(), values.end());
  out.n_runs = values.size();
  const double n = static_cast<double>(values.size());
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  // One correction step removes the rounding error of the naive mean, so
  // identical values give a standard deviation of exactly 0.
  double residual = 0.0;
  for (double v : values) residual += v - out.mean;
  out.mean += residual / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

}  // namespace praisetag

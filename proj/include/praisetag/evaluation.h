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

#ifndef PRAISETAG_EVALUATION_H_
#define PRAISETAG_EVALUATION_H_

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "praisetag/annotation.h"
#include "praisetag/tagging.h"

namespace praisetag {

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  Counts& operator+=(const Counts& other) {
    tp += other.tp;
    fp += other.fp;
    fn += other.fn;
    return *this;
  }
  bool operator==(const Counts&) const = default;
};

struct Scores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Precision, recall and F1 from counts. Every ratio with a zero
// denominator is 0.
Scores scores_from(const Counts& counts);

struct LabelReport {
  Scores scores;
  Counts counts;
  std::size_t support = 0;  // gold items: tp + fn
};

struct MetricReport {
  std::map<EntityLabel, LabelReport> per_label;
  // Present only when correct O tags were scored (token metrics without
  // O-exclusion).
  std::optional<LabelReport> outside;
  // Micro averages pool Effort and Outcome counts (plus O when scored).
  Scores micro;
  Counts counts;
  // Unweighted mean of the Effort and Outcome F1/precision/recall.
  Scores macro;
};

// Raw counts that sum across responses before being turned into a report.
struct MetricCounts {
  std::array<Counts, 3> per_label{};
  std::optional<Counts> outside;

  MetricCounts& operator+=(const MetricCounts& other);
  Counts& at(EntityLabel label) { return per_label[static_cast<std::size_t>(label)]; }
  const Counts& at(EntityLabel label) const { return per_label[static_cast<std::size_t>(label)]; }

  MetricReport report() const;
};

// Labels pooled in micro/macro averages.
inline constexpr std::array<EntityLabel, 2> kScoredLabels = {EntityLabel::kEffort,
                                                             EntityLabel::kOutcome};

// Per-token comparison of full BIO tags. A position is a true positive
// for its label when both tags are identical; otherwise the predicted
// entity tag is a false positive and the gold entity tag a false negative
// (B/I confusion inside one label counts as both). With
// `exclude_outside`, positions where both sides are O are skipped;
// without it O is scored as a class of its own.
MetricCounts token_counts(std::span<const BioTag> gold, std::span<const BioTag> pred,
                          bool exclude_outside);
MetricReport token_metrics(std::span<const BioTag> gold, std::span<const BioTag> pred,
                           bool exclude_outside);

// One-to-one exact matching on (label, token_start, token_end).
MetricCounts span_exact_counts(const std::vector<EntitySpan>& gold,
                               const std::vector<EntitySpan>& pred);
MetricReport span_exact_metrics(const std::vector<EntitySpan>& gold,
                                const std::vector<EntitySpan>& pred);

// Token intersection over union, 0 when the labels differ.
double span_iou(const EntitySpan& a, const EntitySpan& b);

inline constexpr double kDefaultTau = 0.5;

// Greedy one-to-one matching in descending IoU order; a pair may match when
// labels agree and IoU >= tau. tau = 1 is exact matching. Throws
// kInvalidArgument unless 0 < tau <= 1.
MetricCounts partial_counts(const std::vector<EntitySpan>& gold,
                            const std::vector<EntitySpan>& pred, double tau);
MetricReport partial_metrics(const std::vector<EntitySpan>& gold,
                             const std::vector<EntitySpan>& pred, double tau);

enum class CaseCategory { kAccurate, kInaccurate, kPartiallyAccurate, kAccurateNone };

inline constexpr std::array<CaseCategory, 4> kAllCaseCategories = {
    CaseCategory::kAccurate, CaseCategory::kInaccurate, CaseCategory::kPartiallyAccurate,
    CaseCategory::kAccurateNone};

std::string_view case_category_name(CaseCategory category);

CaseCategory categorize_case(const std::vector<EntitySpan>& gold,
                             const std::vector<EntitySpan>& pred, double tau = kDefaultTau);

struct BinaryConfusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
};

struct BinaryReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  BinaryConfusion confusion;
};

// Response-level praise detection, scored per label (Effort, Outcome).
struct ClassificationReport {
  std::map<EntityLabel, BinaryReport> per_label;
};

// Throws kEmptyInput on empty input and kLengthMismatch on unequal sizes.
ClassificationReport classification_metrics(std::span<const PraiseLabels> gold,
                                            std::span<const PraiseLabels> pred);

struct RunAggregate {
  std::string metric_name;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single run
  std::size_t n_runs = 0;
  std::vector<double> values;
};

// Throws kEmptyInput when `values` is empty.
RunAggregate aggregate_runs(std::span<const double> values, std::string name);

}  // namespace praisetag

#endif  // PRAISETAG_EVALUATION_H_

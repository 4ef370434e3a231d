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

#ifndef PRAISETAG_REPORT_H_
#define PRAISETAG_REPORT_H_

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "praisetag/dataset.h"
#include "praisetag/evaluation.h"
#include "praisetag/feedback.h"
#include "praisetag/tagging.h"

namespace praisetag {

using ojson = nlohmann::ordered_json;

// Scores of one prediction set against a gold corpus.
struct EvalReport {
  double tau = kDefaultTau;
  std::size_t n_responses = 0;
  MetricReport token;                    // O-excluded
  MetricReport token_including_outside;  // correct O tags scored
  MetricReport exact;
  MetricReport partial;
  std::map<CaseCategory, std::size_t> cases;
  ClassificationReport classification;
};

struct MultiRunReport {
  double tau = kDefaultTau;
  std::vector<EvalReport> runs;
  std::vector<RunAggregate> aggregates;
};

// Pairs predictions with gold responses by id. Throws kInvariantViolation
// when the id sets differ and kOutOfRange / kOverlappingSpans when a
// prediction does not fit its response.
EvalReport evaluate_predictions(const Corpus& gold, const std::vector<Prediction>& predictions,
                                double tau = kDefaultTau);
MultiRunReport evaluate_runs(const Corpus& gold,
                             const std::vector<std::vector<Prediction>>& prediction_sets,
                             double tau = kDefaultTau);

// The metrics summarized across runs, in output order.
std::vector<std::pair<std::string, double>> headline_metrics(const EvalReport& report);

ojson to_json(const MetricReport& report);
ojson to_json(const ClassificationReport& report);
ojson to_json(const RunAggregate& aggregate);
ojson to_json(const EvalReport& report);
ojson to_json(const MultiRunReport& report);
ojson to_json(const TagDistribution& distribution, const std::string& corpus_name);
ojson to_json(const PraiseLabels& labels);
ojson to_json(const CorrectiveDecision& decision);
ojson to_json(const FeedbackMessage& message);

enum class Averaging { kMicro, kMacro };

std::string format_text(const MultiRunReport& report, Averaging averaging = Averaging::kMicro);
std::string format_text(const TagDistribution& distribution, const std::string& corpus_name);

}  // namespace praisetag

#endif  // PRAISETAG_REPORT_H_

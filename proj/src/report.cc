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

#include "praisetag/report.h"

#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_map>

#include "praisetag/bio.h"
#include "praisetag/error.h"

namespace praisetag {
namespace {

std::string fixed(double value, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

ojson scores_json(const Scores& s) {
  ojson out;
  out["precision"] = s.precision;
  out["recall"] = s.recall;
  out["f1"] = s.f1;
  return out;
}

ojson counts_json(const Counts& c) {
  ojson out;
  out["tp"] = c.tp;
  out["fp"] = c.fp;
  out["fn"] = c.fn;
  return out;
}

ojson label_json(const LabelReport& r) {
  ojson out = scores_json(r.scores);
  out["support"] = r.support;
  out["counts"] = counts_json(r.counts);
  return out;
}

void metric_table(std::ostringstream& out, const std::string& title, const MetricReport& report,
                  Averaging averaging) {
  out << title << '\n';
  out << "  " << pad("label", 10) << pad("precision", 11) << pad("recall", 8) << pad("f1", 7)
      << "support\n";
  auto row = [&out](const std::string& name, const Scores& s, const std::string& support) {
    out << "  " << pad(name, 10) << pad(fixed(s.precision), 11) << pad(fixed(s.recall), 8)
        << pad(fixed(s.f1), 7) << support << '\n';
  };
  for (const auto& [label, r] : report.per_label) {
    if (is_experimental(label) && r.support == 0 && r.counts.fp == 0) continue;
    row(std::string(label_name(label)), r.scores, std::to_string(r.support));
  }
  if (report.outside) row("O", report.outside->scores, std::to_string(report.outside->support));
  if (averaging == Averaging::kMicro) {
    row("micro", report.micro, std::to_string(report.counts.tp + report.counts.fn));
  } else {
    row("macro", report.macro, "-");
  }
}

}  // namespace

EvalReport evaluate_predictions(const Corpus& gold, const std::vector<Prediction>& predictions,
                                double tau) {
  std::unordered_map<std::string, const Prediction*> by_id;
  for (const auto& p : predictions) {
    if (!by_id.emplace(p.response_id, &p).second) {
      throw Error(ErrorCode::kInvariantViolation, "duplicate prediction for \"" + p.response_id + "\"");
    }
  }
  if (by_id.size() != gold.responses.size()) {
    throw Error(ErrorCode::kInvariantViolation,
                "id mismatch: " + std::to_string(gold.responses.size()) + " gold responses, " +
                    std::to_string(by_id.size()) + " predictions");
  }

  EvalReport report;
  report.tau = tau;
  report.n_responses = gold.responses.size();
  for (CaseCategory c : kAllCaseCategories) report.cases[c] = 0;

  MetricCounts token, token_all, exact, partial;
  std::vector<PraiseLabels> gold_labels;
  std::vector<PraiseLabels> pred_labels;
  for (const auto& response : gold.responses) {
    const auto it = by_id.find(response.id());
    if (it == by_id.end()) {
      throw Error(ErrorCode::kInvariantViolation, "id mismatch: no prediction for \"" + response.id() + "\"");
    }
    const auto& spans = it->second->spans;
    try {
      check_spans(spans, response.tokens().size());
    } catch (const Error& e) {
      throw Error(e.code(), "prediction for \"" + response.id() + "\": " + e.what());
    }
    const auto gold_tags = spans_to_tags(response.tokens(), response.gold_spans());
    const auto pred_tags = spans_to_tags(response.tokens(), spans);
    token += token_counts(gold_tags, pred_tags, true);
    token_all += token_counts(gold_tags, pred_tags, false);
    exact += span_exact_counts(response.gold_spans(), spans);
    partial += partial_counts(response.gold_spans(), spans, tau);
    ++report.cases[categorize_case(response.gold_spans(), spans, tau)];
    gold_labels.push_back(derive_labels(response.gold_spans()));
    pred_labels.push_back(derive_labels(spans));
  }
  report.token = token.report();
  if (!token_all.outside) token_all.outside = Counts{};
  report.token_including_outside = token_all.report();
  report.exact = exact.report();
  report.partial = partial.report();
  if (!gold_labels.empty()) report.classification = classification_metrics(gold_labels, pred_labels);
  return report;
}

std::vector<std::pair<std::string, double>> headline_metrics(const EvalReport& report) {
  std::vector<std::pair<std::string, double>> out = {
      {"token.micro_f1", report.token.micro.f1},
      {"token.macro_f1", report.token.macro.f1},
      {"token.Effort.f1", report.token.per_label.at(EntityLabel::kEffort).scores.f1},
      {"token.Outcome.f1", report.token.per_label.at(EntityLabel::kOutcome).scores.f1},
      {"exact.micro_f1", report.exact.micro.f1},
      {"partial.micro_f1", report.partial.micro.f1},
  };
  for (const auto& [label, r] : report.classification.per_label) {
    const std::string prefix = "classification." + std::string(label_name(label));
    out.emplace_back(prefix + ".accuracy", r.accuracy);
    out.emplace_back(prefix + ".f1", r.f1);
  }
  return out;
}

MultiRunReport evaluate_runs(const Corpus& gold,
                             const std::vector<std::vector<Prediction>>& prediction_sets,
                             double tau) {
  if (prediction_sets.empty()) throw Error(ErrorCode::kEmptyInput, "no prediction sets");
  MultiRunReport out;
  out.tau = tau;
  for (const auto& set : prediction_sets) out.runs.push_back(evaluate_predictions(gold, set, tau));

  const auto names = headline_metrics(out.runs.front());
  for (std::size_t m = 0; m < names.size(); ++m) {
    std::vector<double> values;
    for (const auto& run : out.runs) values.push_back(headline_metrics(run)[m].second);
    out.aggregates.push_back(aggregate_runs(values, names[m].first));
  }
  return out;
}

ojson to_json(const MetricReport& report) {
  ojson out;
  ojson per_label = ojson::object();
  for (const auto& [label, r] : report.per_label) per_label[std::string(label_name(label))] = label_json(r);
  out["per_label"] = std::move(per_label);
  if (report.outside) out["outside"] = label_json(*report.outside);
  out["micro"] = scores_json(report.micro);
  out["macro"] = scores_json(report.macro);
  out["counts"] = counts_json(report.counts);
  return out;
}

ojson to_json(const ClassificationReport& report) {
  ojson out;
  ojson per_label = ojson::object();
  for (const auto& [label, r] : report.per_label) {
    ojson item;
    item["accuracy"] = r.accuracy;
    item["precision"] = r.precision;
    item["recall"] = r.recall;
    item["f1"] = r.f1;
    item["confusion"] = {{"tp", r.confusion.tp}, {"fp", r.confusion.fp},
                         {"fn", r.confusion.fn}, {"tn", r.confusion.tn}};
    per_label[std::string(label_name(label))] = std::move(item);
  }
  out["per_label"] = std::move(per_label);
  return out;
}

ojson to_json(const RunAggregate& aggregate) {
  ojson out;
  out["metric_name"] = aggregate.metric_name;
  out["mean"] = aggregate.mean;
  out["std"] = aggregate.std;
  out["n_runs"] = aggregate.n_runs;
  out["values"] = aggregate.values;
  return out;
}

ojson to_json(const EvalReport& report) {
  ojson out;
  out["n_responses"] = report.n_responses;
  out["token"] = to_json(report.token);
  out["token_including_outside"] = to_json(report.token_including_outside);
  out["exact"] = to_json(report.exact);
  out["partial"] = to_json(report.partial);
  ojson cases = ojson::object();
  for (CaseCategory c : kAllCaseCategories) cases[std::string(case_category_name(c))] = report.cases.at(c);
  out["cases"] = std::move(cases);
  out["classification"] = to_json(report.classification);
  return out;
}

ojson to_json(const MultiRunReport& report) {
  ojson out;
  out["tau"] = report.tau;
  out["n_runs"] = report.runs.size();
  ojson runs = ojson::array();
  for (const auto& run : report.runs) runs.push_back(to_json(run));
  out["runs"] = std::move(runs);
  ojson aggregates = ojson::array();
  for (const auto& a : report.aggregates) aggregates.push_back(to_json(a));
  out["aggregate"] = std::move(aggregates);
  return out;
}

ojson to_json(const TagDistribution& distribution, const std::string& corpus_name) {
  ojson out;
  out["corpus"] = corpus_name;
  out["total"] = distribution.total();
  ojson counts = ojson::object();
  ojson percentages = ojson::object();
  for (std::size_t i = 0; i < kDistributionKeys.size(); ++i) {
    const std::string key(kDistributionKeys[i]);
    counts[key] = distribution.counts[i];
    percentages[key] = distribution.rounded_percentage(i);
  }
  out["counts"] = std::move(counts);
  out["percentages"] = std::move(percentages);
  return out;
}

ojson to_json(const PraiseLabels& labels) {
  return ojson{{"effort", labels.effort}, {"outcome", labels.outcome}, {"person", labels.person}};
}

ojson to_json(const CorrectiveDecision& decision) {
  return ojson{{"verdict", verdict_name(decision.verdict)},
               {"rationale_code", rationale_name(decision.rationale)}};
}

ojson to_json(const FeedbackMessage& message) {
  ojson items = ojson::array();
  for (const auto& item : message.items) {
    ojson entry;
    entry["template_id"] = template_id_name(item.template_id);
    entry["text"] = item.text;
    if (item.span) {
      ojson span;
      span["label"] = label_name(item.span->label);
      span["token_start"] = item.span->token_start;
      span["token_end"] = item.span->token_end;
      span["confidence"] = item.span->confidence.value_or(1.0);
      entry["span"] = std::move(span);
      entry["quote"] = item.quote;
      entry["char_start"] = item.char_start;
      entry["char_end"] = item.char_end;
    } else {
      entry["span"] = nullptr;
      entry["quote"] = nullptr;
    }
    items.push_back(std::move(entry));
  }
  ojson out;
  out["items"] = std::move(items);
  out["verdict"] = to_json(message.verdict);
  out["retry_prompt"] = message.retry_prompt;
  out["explain_prompt"] = message.explain_prompt;
  return out;
}

std::string format_text(const MultiRunReport& report, Averaging averaging) {
  std::ostringstream out;
  for (std::size_t r = 0; r < report.runs.size(); ++r) {
    const EvalReport& run = report.runs[r];
    if (report.runs.size() > 1) out << "== run " << (r + 1) << " ==\n";
    out << "responses: " << run.n_responses << "  tau: " << fixed(report.tau, 2) << '\n';
    metric_table(out, "token-level (O excluded)", run.token, averaging);
    metric_table(out, "token-level (O included)", run.token_including_outside, averaging);
    metric_table(out, "span exact match", run.exact, averaging);
    metric_table(out, "span partial match (IoU >= " + fixed(report.tau, 2) + ")", run.partial, averaging);
    out << "cases\n";
    for (CaseCategory c : kAllCaseCategories) {
      out << "  " << pad(std::string(case_category_name(c)), 19) << run.cases.at(c) << '\n';
    }
    out << "praise classification\n";
    out << "  " << pad("label", 10) << pad("accuracy", 10) << pad("precision", 11) << pad("recall", 8)
        << "f1\n";
    for (const auto& [label, b] : run.classification.per_label) {
      out << "  " << pad(std::string(label_name(label)), 10) << pad(fixed(b.accuracy), 10)
          << pad(fixed(b.precision), 11) << pad(fixed(b.recall), 8) << fixed(b.f1) << '\n';
    }
  }
  if (report.runs.size() > 1) {
    out << "== aggregate ==\n";
    for (const auto& a : report.aggregates) {
      out << "  " << pad(a.metric_name, 32) << fixed(a.mean) << " ± " << fixed(a.std)
          << "  (mean ± std over " << a.n_runs << " runs)\n";
    }
  }
  return out.str();
}

std::string format_text(const TagDistribution& distribution, const std::string& corpus_name) {
  std::ostringstream out;
  out << "corpus: " << corpus_name << "  tokens: " << distribution.total() << '\n';
  for (std::size_t i = 0; i < kDistributionKeys.size(); ++i) {
    out << "  " << pad(std::string(kDistributionKeys[i]), 11) << pad(std::to_string(distribution.counts[i]), 8)
        << fixed(distribution.rounded_percentage(i), 1) << "%\n";
  }
  return out.str();
}

}  // namespace praisetag

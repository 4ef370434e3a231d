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

#include "praisetag/annotation.h"

#include <algorithm>
#include <tuple>

#include "praisetag/error.h"
#include "praisetag/tokenizer.h"

namespace praisetag {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kLengthMismatch: return "length-mismatch";
    case ErrorCode::kIllFormedTags: return "ill-formed-tags";
    case ErrorCode::kOverlappingSpans: return "overlapping-spans";
    case ErrorCode::kOutOfRange: return "out-of-range";
    case ErrorCode::kParse: return "parse-error";
    case ErrorCode::kInvariantViolation: return "invariant-violation";
    case ErrorCode::kEmptyInput: return "empty-input";
    case ErrorCode::kMissingConfidence: return "missing-confidence";
    case ErrorCode::kTemplateMissing: return "template-missing";
    case ErrorCode::kIo: return "io-error";
  }
  return "unknown";
}

std::string_view label_name(EntityLabel label) {
  switch (label) {
    case EntityLabel::kEffort: return "Effort";
    case EntityLabel::kOutcome: return "Outcome";
    case EntityLabel::kPerson: return "Person";
  }
  return "Effort";
}

std::optional<EntityLabel> parse_label(std::string_view name) {
  for (EntityLabel label : kAllLabels) {
    if (label_name(label) == name) return label;
  }
  return std::nullopt;
}

std::optional<BioTag> BioTag::parse(std::string_view text) {
  if (text == "O") return outside();
  if (text.size() < 3 || text[1] != '-') return std::nullopt;
  const auto label = parse_label(text.substr(2));
  if (!label) return std::nullopt;
  if (text[0] == 'B') return begin(*label);
  if (text[0] == 'I') return inside(*label);
  return std::nullopt;
}

std::string BioTag::str() const {
  if (kind_ == TagKind::kOutside) return "O";
  std::string out = kind_ == TagKind::kBegin ? "B-" : "I-";
  out += label_name(*label_);
  return out;
}

bool span_less(const EntitySpan& a, const EntitySpan& b) {
  return std::tie(a.token_start, a.token_end, a.label) <
         std::tie(b.token_start, b.token_end, b.label);
}

void check_spans(const std::vector<EntitySpan>& spans, std::size_t token_count) {
  for (const auto& span : spans) {
    if (span.token_start >= span.token_end || span.token_end > token_count) {
      throw Error(ErrorCode::kOutOfRange,
                  "span [" + std::to_string(span.token_start) + ", " +
                      std::to_string(span.token_end) + ") is invalid for " +
                      std::to_string(token_count) + " tokens");
    }
  }
  std::vector<EntitySpan> sorted = spans;
  std::sort(sorted.begin(), sorted.end(), span_less);
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].token_start < sorted[i - 1].token_end) {
      throw Error(ErrorCode::kOverlappingSpans,
                  "spans starting at tokens " + std::to_string(sorted[i - 1].token_start) +
                      " and " + std::to_string(sorted[i].token_start) + " overlap");
    }
  }
}

std::vector<EntitySpan> resolve_overlaps(std::vector<EntitySpan> spans) {
  std::stable_sort(spans.begin(), spans.end(), [](const EntitySpan& a, const EntitySpan& b) {
    if (a.token_start != b.token_start) return a.token_start < b.token_start;
    return a.length() > b.length();
  });
  std::vector<EntitySpan> kept;
  std::size_t covered_until = 0;
  for (auto& span : spans) {
    if (!kept.empty() && span.token_start < covered_until) continue;
    covered_until = span.token_end;
    kept.push_back(std::move(span));
  }
  return kept;
}

AnnotatedResponse::AnnotatedResponse(std::string id, std::string text,
                                     std::vector<EntitySpan> gold_spans, Meta meta)
    : id_(std::move(id)),
      text_(std::move(text)),
      tokens_(tokenize(text_)),
      gold_spans_(std::move(gold_spans)),
      meta_(std::move(meta)) {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::kInvariantViolation, "response \"" + id_ + "\": " + why);
  };
  if (id_.empty()) fail("empty id");
  if (tokens_.empty()) fail("text has no tokens");
  try {
    check_spans(gold_spans_, tokens_.size());
  } catch (const Error& e) {
    fail(e.what());
  }
  for (auto& span : gold_spans_) span.confidence.reset();
  std::sort(gold_spans_.begin(), gold_spans_.end(), span_less);
}

}  // namespace praisetag

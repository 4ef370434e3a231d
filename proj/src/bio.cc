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

#include "praisetag/bio.h"

#include "praisetag/error.h"

namespace praisetag {
namespace {

// Empty string when tags[i] is acceptable given its predecessor.
std::string_view local_violation(std::span<const BioTag> tags, std::size_t i) {
  const BioTag& tag = tags[i];
  if (tag.kind() != TagKind::kInside) return {};
  if (i == 0 || tags[i - 1].is_outside()) return kReasonIWithoutB;
  if (tags[i - 1].label() != tag.label()) return kReasonLabelMismatch;
  return {};
}

}  // namespace

ValidationResult validate_bio(std::span<const BioTag> tags) {
  ValidationResult result;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const auto reason = local_violation(tags, i);
    if (!reason.empty()) result.violations.push_back({i, std::string(reason)});
  }
  return result;
}

// Repairs only flip I to B with the same label, so the label of every
// predecessor is unchanged and checking against the input is equivalent to
// checking against the partially repaired output.
TagSequence repair_bio(std::span<const BioTag> tags) {
  TagSequence out(tags.begin(), tags.end());
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (!local_violation(tags, i).empty()) out[i] = BioTag::begin(*tags[i].label());
  }
  return out;
}

TagSequence spans_to_tags(std::size_t token_count, std::span<const EntitySpan> spans) {
  check_spans(std::vector<EntitySpan>(spans.begin(), spans.end()), token_count);
  TagSequence tags(token_count);
  for (const auto& span : spans) {
    tags[span.token_start] = BioTag::begin(span.label);
    for (std::size_t i = span.token_start + 1; i < span.token_end; ++i) {
      tags[i] = BioTag::inside(span.label);
    }
  }
  return tags;
}

TagSequence spans_to_tags(const TokenSequence& tokens, std::span<const EntitySpan> spans) {
  return spans_to_tags(tokens.size(), spans);
}

std::vector<EntitySpan> tags_to_spans(std::size_t token_count,
                                      std::span<const BioTag> tags) {
  if (tags.size() != token_count) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(tags.size()) + " tags for " + std::to_string(token_count) +
                    " tokens");
  }
  const auto validation = validate_bio(tags);
  if (!validation.ok()) {
    const auto& first = validation.violations.front();
    throw Error(ErrorCode::kIllFormedTags,
                "tag " + std::to_string(first.index) + ": " + first.reason);
  }
  std::vector<EntitySpan> spans;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i].kind() != TagKind::kBegin) continue;
    std::size_t end = i + 1;
    while (end < tags.size() && tags[end].kind() == TagKind::kInside) ++end;
    spans.push_back({*tags[i].label(), i, end, std::nullopt});
    i = end - 1;
  }
  return spans;
}

std::vector<EntitySpan> tags_to_spans(const TokenSequence& tokens,
                                      std::span<const BioTag> tags) {
  return tags_to_spans(tokens.size(), tags);
}

std::string span_text(std::string_view text, const TokenSequence& tokens,
                      const EntitySpan& span) {
  if (span.token_start >= span.token_end || span.token_end > tokens.size()) {
    throw Error(ErrorCode::kOutOfRange, "span is out of range for the response tokens");
  }
  const std::size_t begin = tokens[span.token_start].byte_start;
  const std::size_t end = tokens[span.token_end - 1].byte_end;
  return std::string(text.substr(begin, end - begin));
}

std::string span_text(const AnnotatedResponse& response, const EntitySpan& span) {
  return span_text(response.text(), response.tokens(), span);
}

}  // namespace praisetag

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

#ifndef PRAISETAG_BIO_H_
#define PRAISETAG_BIO_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "praisetag/annotation.h"

namespace praisetag {

struct BioViolation {
  std::size_t index = 0;
  std::string reason;

  bool operator==(const BioViolation&) const = default;
};

struct ValidationResult {
  std::vector<BioViolation> violations;

  bool ok() const { return violations.empty(); }
};

inline constexpr std::string_view kReasonIWithoutB = "I without preceding B";
inline constexpr std::string_view kReasonLabelMismatch =
    "label mismatch with preceding tag";

// IOB2 check: every I must follow a B or I of the same label. Never throws.
ValidationResult validate_bio(std::span<const BioTag> tags);

// Turns every I that lacks a valid predecessor into a B of the same label.
// Idempotent; the result always validates.
TagSequence repair_bio(std::span<const BioTag> tags);

TagSequence spans_to_tags(std::size_t token_count, std::span<const EntitySpan> spans);
TagSequence spans_to_tags(const TokenSequence& tokens, std::span<const EntitySpan> spans);

// Inverse of spans_to_tags on well-formed input. Confidences are absent.
std::vector<EntitySpan> tags_to_spans(std::size_t token_count,
                                      std::span<const BioTag> tags);
std::vector<EntitySpan> tags_to_spans(const TokenSequence& tokens,
                                      std::span<const BioTag> tags);

// Original text from the first token's start to the last token's end.
std::string span_text(std::string_view text, const TokenSequence& tokens,
                      const EntitySpan& span);
std::string span_text(const AnnotatedResponse& response, const EntitySpan& span);

}  // namespace praisetag

#endif  // PRAISETAG_BIO_H_

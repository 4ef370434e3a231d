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

#ifndef PRAISETAG_ANNOTATION_H_
#define PRAISETAG_ANNOTATION_H_

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace praisetag {

// Praise categories. Person is representable but experimental: the
// reference data had a single instance of it.
enum class EntityLabel { kEffort, kOutcome, kPerson };

inline constexpr std::array<EntityLabel, 3> kAllLabels = {
    EntityLabel::kEffort, EntityLabel::kOutcome, EntityLabel::kPerson};

std::string_view label_name(EntityLabel label);
std::optional<EntityLabel> parse_label(std::string_view name);
inline bool is_experimental(EntityLabel label) {
  return label == EntityLabel::kPerson;
}

// A word-level token. Character offsets count Unicode scalar values; byte
// offsets index the UTF-8 source and are what slicing uses.
struct Token {
  std::string text;
  std::size_t char_start = 0;
  std::size_t char_end = 0;
  std::size_t byte_start = 0;
  std::size_t byte_end = 0;

  bool operator==(const Token&) const = default;
};

using TokenSequence = std::vector<Token>;

enum class TagKind { kOutside, kBegin, kInside };

class BioTag {
 public:
  BioTag() = default;

  static BioTag outside() { return BioTag(); }
  static BioTag begin(EntityLabel label) { return BioTag(TagKind::kBegin, label); }
  static BioTag inside(EntityLabel label) { return BioTag(TagKind::kInside, label); }

  // Accepts "O", "B-Effort", "I-Outcome", ...
  static std::optional<BioTag> parse(std::string_view text);

  TagKind kind() const { return kind_; }
  std::optional<EntityLabel> label() const { return label_; }
  bool is_outside() const { return kind_ == TagKind::kOutside; }

  std::string str() const;

  bool operator==(const BioTag&) const = default;

 private:
  BioTag(TagKind kind, EntityLabel label) : kind_(kind), label_(label) {}

  TagKind kind_ = TagKind::kOutside;
  std::optional<EntityLabel> label_;
};

using TagSequence = std::vector<BioTag>;

// Half-open token range [token_start, token_end).
struct EntitySpan {
  EntityLabel label = EntityLabel::kEffort;
  std::size_t token_start = 0;
  std::size_t token_end = 0;
  std::optional<double> confidence;

  std::size_t length() const { return token_end - token_start; }
  bool same_extent(const EntitySpan& other) const {
    return label == other.label && token_start == other.token_start &&
           token_end == other.token_end;
  }

  bool operator==(const EntitySpan&) const = default;
};

// Orders spans by start, then end, then label.
bool span_less(const EntitySpan& a, const EntitySpan& b);

// Throws kOutOfRange or kOverlappingSpans when `spans` are not valid,
// pairwise disjoint ranges over `token_count` tokens.
void check_spans(const std::vector<EntitySpan>& spans, std::size_t token_count);

// Makes predicted spans disjoint: the earlier-starting span wins, ties go
// to the longer span, then to the earlier list position. Output is in
// token order.
std::vector<EntitySpan> resolve_overlaps(std::vector<EntitySpan> spans);

using Meta = std::map<std::string, std::string>;

class AnnotatedResponse {
 public:
  // Tokenizes `text`, validates and sorts `gold_spans`. Throws
  // kInvariantViolation naming `id` when anything is off.
  AnnotatedResponse(std::string id, std::string text,
                    std::vector<EntitySpan> gold_spans, Meta meta = {});

  const std::string& id() const { return id_; }
  const std::string& text() const { return text_; }
  const TokenSequence& tokens() const { return tokens_; }
  const std::vector<EntitySpan>& gold_spans() const { return gold_spans_; }
  const Meta& meta() const { return meta_; }

  bool operator==(const AnnotatedResponse&) const = default;

 private:
  std::string id_;
  std::string text_;
  TokenSequence tokens_;
  std::vector<EntitySpan> gold_spans_;
  Meta meta_;
};

}  // namespace praisetag

#endif  // PRAISETAG_ANNOTATION_H_

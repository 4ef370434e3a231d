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

#ifndef PRAISETAG_TAGGING_H_
#define PRAISETAG_TAGGING_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "praisetag/annotation.h"

namespace praisetag {

// A tagger's output for one response. Spans are disjoint and every span
// carries a confidence in [0, 1].
struct Prediction {
  std::string response_id;
  std::vector<EntitySpan> spans;
  std::string tagger_id;
  std::int64_t latency_ms = 0;

  bool operator==(const Prediction&) const = default;
};

struct LexiconEntry {
  std::vector<std::string> pattern;
  EntityLabel label = EntityLabel::kEffort;
  double confidence = 1.0;
};

class Lexicon {
 public:
  // Lower-cases patterns. Throws kInvalidArgument on an empty pattern, an
  // empty word, a confidence outside [0, 1] or a duplicate (pattern, label).
  explicit Lexicon(std::vector<LexiconEntry> entries);

  // JSON array of {"pattern": [...], "label": "...", "confidence": x}.
  static Lexicon load(const std::filesystem::path& path);
  static Lexicon from_json_text(std::string_view text);

  // Phrases quoted from real tutor responses score 0.9, generalized
  // variants 0.6.
  static Lexicon default_lexicon();

  const std::vector<LexiconEntry>& entries() const { return entries_; }
  std::size_t max_pattern_length() const { return max_len_; }

 private:
  std::vector<LexiconEntry> entries_;
  std::size_t max_len_ = 0;
};

inline constexpr std::string_view kLexiconTaggerId = "lexicon";
inline constexpr std::string_view kFallbackTaggerId = "lexicon-fallback";
inline constexpr std::string_view kExternalTaggerId = "external";

// Greedy left-to-right longest match over lower-cased token texts. Tokens
// made only of punctuation never match. Pure, so latency_ms is always 0.
Prediction lexicon_tag(std::string_view response_text, const Lexicon& lexicon,
                       std::string response_id = {});
Prediction lexicon_tag(const TokenSequence& tokens, const Lexicon& lexicon,
                       std::string response_id = {});

struct PraiseLabels {
  bool effort = false;
  bool outcome = false;
  bool person = false;

  bool operator==(const PraiseLabels&) const = default;
};

PraiseLabels derive_labels(const std::vector<EntitySpan>& spans);

enum class Verdict { kDesired, kMixed, kUndesired, kNoPraise };

enum class RationaleCode {
  kEffortOnly,
  kEffortWithOther,
  kOutcomeOrPersonOnly,
  kNoPraiseEntities,
};

struct CorrectiveDecision {
  Verdict verdict = Verdict::kNoPraise;
  RationaleCode rationale = RationaleCode::kNoPraiseEntities;

  bool operator==(const CorrectiveDecision&) const = default;
};

std::string_view verdict_name(Verdict verdict);
std::string_view rationale_name(RationaleCode code);

// Effort alone is desired; effort with outcome or person praise is mixed;
// outcome or person praise without effort is undesired.
CorrectiveDecision classify_correctness(const PraiseLabels& labels);

}  // namespace praisetag

#endif  // PRAISETAG_TAGGING_H_

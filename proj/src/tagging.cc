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

#include "praisetag/tagging.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "praisetag/error.h"
#include "praisetag/tokenizer.h"

namespace praisetag {
namespace {

std::string ascii_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace

Lexicon::Lexicon(std::vector<LexiconEntry> entries) : entries_(std::move(entries)) {
  std::set<std::pair<std::vector<std::string>, EntityLabel>> seen;
  for (auto& entry : entries_) {
    if (entry.pattern.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "lexicon pattern is empty");
    }
    for (auto& word : entry.pattern) {
      if (word.empty()) throw Error(ErrorCode::kInvalidArgument, "lexicon pattern has an empty word");
      word = ascii_lower(word);
    }
    if (!(entry.confidence >= 0.0 && entry.confidence <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "lexicon confidence outside [0, 1]");
    }
    if (!seen.emplace(entry.pattern, entry.label).second) {
      std::string joined;
      for (const auto& w : entry.pattern) joined += (joined.empty() ? "" : " ") + w;
      throw Error(ErrorCode::kInvalidArgument, "duplicate lexicon entry \"" + joined + "\"");
    }
    max_len_ = std::max(max_len_, entry.pattern.size());
  }
}

Lexicon Lexicon::from_json_text(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("lexicon: ") + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCode::kParse, "lexicon: expected a JSON array");
  std::vector<LexiconEntry> entries;
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("pattern") || !item.contains("label") ||
        !item.contains("confidence") || !item["pattern"].is_array() ||
        !item["label"].is_string() || !item["confidence"].is_number()) {
      throw Error(ErrorCode::kParse, "lexicon: malformed entry " + item.dump());
    }
    LexiconEntry entry;
    for (const auto& word : item["pattern"]) {
      if (!word.is_string()) throw Error(ErrorCode::kParse, "lexicon: pattern words must be strings");
      entry.pattern.push_back(word.get<std::string>());
    }
    const auto label = parse_label(item["label"].get<std::string>());
    if (!label) throw Error(ErrorCode::kParse, "lexicon: unknown label " + item["label"].dump());
    entry.label = *label;
    entry.confidence = item["confidence"].get<double>();
    entries.push_back(std::move(entry));
  }
  return Lexicon(std::move(entries));
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read lexicon " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

Lexicon Lexicon::default_lexicon() {
  using L = EntityLabel;
  constexpr double kQuoted = 0.9;
  constexpr double kGeneral = 0.6;
  return Lexicon({
      {{"good", "job"}, L::kOutcome, kQuoted},
      {{"great", "job"}, L::kOutcome, kQuoted},
      {{"doing", "great", "so", "far"}, L::kOutcome, kQuoted},
      {{"did", "well"}, L::kOutcome, kQuoted},
      {{"stuck", "with", "it"}, L::kEffort, kQuoted},
      {{"worked", "hard"}, L::kEffort, kQuoted},
      {{"working", "through", "this"}, L::kEffort, kQuoted},
      {{"trying", "some", "different", "approaches"}, L::kEffort, kQuoted},
      {{"you", "are", "committed"}, L::kEffort, kQuoted},
      {{"you", "are", "so", "talented"}, L::kPerson, kQuoted},
      {{"you", "are", "very", "smart"}, L::kPerson, kQuoted},
      {{"nice", "job"}, L::kOutcome, kGeneral},
      {{"well", "done"}, L::kOutcome, kGeneral},
      {{"great", "work"}, L::kOutcome, kGeneral},
      {{"excellent", "work"}, L::kOutcome, kGeneral},
      {{"work", "hard"}, L::kEffort, kGeneral},
      {{"working", "hard"}, L::kEffort, kGeneral},
      {{"kept", "working"}, L::kEffort, kGeneral},
      {{"keep", "trying"}, L::kEffort, kGeneral},
      {{"never", "gave", "up"}, L::kEffort, kGeneral},
      {{"did", "not", "give", "up"}, L::kEffort, kGeneral},
      {{"your", "effort"}, L::kEffort, kGeneral},
      {{"so", "smart"}, L::kPerson, kGeneral},
      {{"natural", "talent"}, L::kPerson, kGeneral},
  });
}

Prediction lexicon_tag(const TokenSequence& tokens, const Lexicon& lexicon,
                       std::string response_id) {
  std::vector<std::string> lowered;
  std::vector<bool> matchable;
  lowered.reserve(tokens.size());
  for (const auto& token : tokens) {
    lowered.push_back(ascii_lower(token.text));
    matchable.push_back(!is_punctuation_token(token.text));
  }

  Prediction prediction;
  prediction.response_id = std::move(response_id);
  prediction.tagger_id = std::string(kLexiconTaggerId);

  std::size_t i = 0;
  while (i < tokens.size()) {
    const LexiconEntry* best = nullptr;
    for (const auto& entry : lexicon.entries()) {
      const std::size_t len = entry.pattern.size();
      if (i + len > tokens.size()) continue;
      if (best != nullptr && len <= best->pattern.size()) continue;
      bool match = true;
      for (std::size_t k = 0; k < len && match; ++k) {
        match = matchable[i + k] && lowered[i + k] == entry.pattern[k];
      }
      if (match) best = &entry;
    }
    if (best == nullptr) {
      ++i;
      continue;
    }
    prediction.spans.push_back({best->label, i, i + best->pattern.size(), best->confidence});
    i += best->pattern.size();
  }
  return prediction;
}

Prediction lexicon_tag(std::string_view response_text, const Lexicon& lexicon,
                       std::string response_id) {
  return lexicon_tag(tokenize(response_text), lexicon, std::move(response_id));
}

PraiseLabels derive_labels(const std::vector<EntitySpan>& spans) {
  PraiseLabels labels;
  for (const auto& span : spans) {
    switch (span.label) {
      case EntityLabel::kEffort: labels.effort = true; break;
      case EntityLabel::kOutcome: labels.outcome = true; break;
      case EntityLabel::kPerson: labels.person = true; break;
    }
  }
  return labels;
}

std::string_view verdict_name(Verdict verdict) {
  switch (verdict) {
    case Verdict::kDesired: return "Desired";
    case Verdict::kMixed: return "Mixed";
    case Verdict::kUndesired: return "Undesired";
    case Verdict::kNoPraise: return "NoPraise";
  }
  return "NoPraise";
}

std::string_view rationale_name(RationaleCode code) {
  switch (code) {
    case RationaleCode::kEffortOnly: return "effort_only";
    case RationaleCode::kEffortWithOther: return "effort_with_outcome_or_person";
    case RationaleCode::kOutcomeOrPersonOnly: return "outcome_or_person_without_effort";
    case RationaleCode::kNoPraiseEntities: return "no_praise_entities";
  }
  return "no_praise_entities";
}

CorrectiveDecision classify_correctness(const PraiseLabels& labels) {
  const bool other = labels.outcome || labels.person;
  if (labels.effort && !other) return {Verdict::kDesired, RationaleCode::kEffortOnly};
  if (labels.effort) return {Verdict::kMixed, RationaleCode::kEffortWithOther};
  if (other) return {Verdict::kUndesired, RationaleCode::kOutcomeOrPersonOnly};
  return {Verdict::kNoPraise, RationaleCode::kNoPraiseEntities};
}

}  // namespace praisetag

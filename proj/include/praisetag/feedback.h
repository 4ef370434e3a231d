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

#ifndef PRAISETAG_FEEDBACK_H_
#define PRAISETAG_FEEDBACK_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "praisetag/annotation.h"
#include "praisetag/tagging.h"

namespace praisetag {

enum class TemplateId {
  kEffortPraise,
  kOutcomeRedirect,
  kPersonRedirect,
  kEffortHedged,
  kOutcomeHedged,
  kNoPraise,
};

inline constexpr std::array<TemplateId, 6> kAllTemplateIds = {
    TemplateId::kEffortPraise, TemplateId::kOutcomeRedirect, TemplateId::kPersonRedirect,
    TemplateId::kEffortHedged, TemplateId::kOutcomeHedged,   TemplateId::kNoPraise};

std::string_view template_id_name(TemplateId id);
std::optional<TemplateId> parse_template_id(std::string_view name);
bool is_hedged(TemplateId id);

inline constexpr std::string_view kQuotePlaceholder = "{quote}";

std::map<TemplateId, std::string> default_templates();

struct FeedbackConfig {
  double confidence_threshold = 0.5;
  std::map<TemplateId, std::string> templates = default_templates();
  bool allow_retry_prompt = true;

  // Throws kTemplateMissing when a template is absent or lacks {quote}
  // (NoPraise excepted), kInvalidArgument for a threshold outside [0, 1].
  void validate() const;
};

// Reads a JSON object mapping template names to strings. The file replaces
// the whole template set, so it must define every template.
std::map<TemplateId, std::string> load_templates(const std::filesystem::path& path);
std::map<TemplateId, std::string> templates_from_json_text(std::string_view text);

// Confident or hedged template for a span. Returns nullopt for a Person span
// below the threshold, which is dropped. Throws kMissingConfidence.
std::optional<TemplateId> select_template(const EntitySpan& span, const FeedbackConfig& config);

struct FeedbackItem {
  std::optional<EntitySpan> span;  // absent for NoPraise
  TemplateId template_id = TemplateId::kNoPraise;
  std::string quote;
  std::string text;
  std::size_t char_start = 0;
  std::size_t char_end = 0;
};

struct FeedbackMessage {
  std::vector<FeedbackItem> items;
  CorrectiveDecision verdict;
  bool retry_prompt = false;
  bool explain_prompt = false;
};

// Renders one item per surviving span in token order, or a single NoPraise
// item when nothing survives. The verdict is computed from the surviving
// spans. retry_prompt is set for non-desired verdicts when allowed;
// explain_prompt whenever a hedged item was rendered.
FeedbackMessage render_feedback(std::string_view text, const TokenSequence& tokens,
                                const Prediction& prediction, const FeedbackConfig& config);

}  // namespace praisetag

#endif  // PRAISETAG_FEEDBACK_H_

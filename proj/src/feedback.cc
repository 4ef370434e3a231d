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

#include "praisetag/feedback.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "praisetag/bio.h"
#include "praisetag/error.h"

namespace praisetag {

std::string_view template_id_name(TemplateId id) {
  switch (id) {
    case TemplateId::kEffortPraise: return "EffortPraise";
    case TemplateId::kOutcomeRedirect: return "OutcomeRedirect";
    case TemplateId::kPersonRedirect: return "PersonRedirect";
    case TemplateId::kEffortHedged: return "EffortHedged";
    case TemplateId::kOutcomeHedged: return "OutcomeHedged";
    case TemplateId::kNoPraise: return "NoPraise";
  }
  return "NoPraise";
}

std::optional<TemplateId> parse_template_id(std::string_view name) {
  for (TemplateId id : kAllTemplateIds) {
    if (template_id_name(id) == name) return id;
  }
  return std::nullopt;
}

bool is_hedged(TemplateId id) {
  return id == TemplateId::kEffortHedged || id == TemplateId::kOutcomeHedged;
}

std::map<TemplateId, std::string> default_templates() {
  return {
      {TemplateId::kEffortPraise,
       "Saying \"{quote}\" is a nice example of process-focused praise, which praises "
       "students for their effort."},
      {TemplateId::kOutcomeRedirect,
       "Saying \"{quote}\" is praising students for the outcome. You should focus on "
       "praising the students for their effort and process towards learning. Do you want "
       "to try responding again?"},
      {TemplateId::kPersonRedirect,
       "Saying \"{quote}\" is praising students for who they are rather than what they "
       "did. You should focus on praising the students for their effort and process "
       "towards learning. Do you want to try responding again?"},
      {TemplateId::kEffortHedged,
       "Saying \"{quote}\" might be an example of praising effort. Do you want to explain "
       "your reasoning?"},
      {TemplateId::kOutcomeHedged,
       "Saying \"{quote}\" might be an example of praising the outcome. Do you want to "
       "explain your reasoning?"},
      {TemplateId::kNoPraise,
       "This response doesn't yet include praise. Try praising the student's effort, "
       "for example, how they kept working through the problem. Do you want to try "
       "responding again?"},
  };
}

void FeedbackConfig::validate() const {
  if (!(confidence_threshold >= 0.0 && confidence_threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "confidence threshold must be in [0, 1]");
  }
  for (TemplateId id : kAllTemplateIds) {
    const auto it = templates.find(id);
    if (it == templates.end()) {
      throw Error(ErrorCode::kTemplateMissing,
                  "no template for " + std::string(template_id_name(id)));
    }
    if (id != TemplateId::kNoPraise && it->second.find(kQuotePlaceholder) == std::string::npos) {
      throw Error(ErrorCode::kTemplateMissing,
                  "template " + std::string(template_id_name(id)) + " lacks {quote}");
    }
  }
}

std::map<TemplateId, std::string> templates_from_json_text(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("templates: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::kParse, "templates: expected a JSON object");
  std::map<TemplateId, std::string> out;
  for (const auto& [key, value] : doc.items()) {
    const auto id = parse_template_id(key);
    if (!id) throw Error(ErrorCode::kParse, "templates: unknown template id \"" + key + "\"");
    if (!value.is_string()) throw Error(ErrorCode::kParse, "templates: \"" + key + "\" is not a string");
    out[*id] = value.get<std::string>();
  }
  FeedbackConfig probe;
  probe.templates = out;
  probe.validate();
  return out;
}

std::map<TemplateId, std::string> load_templates(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read templates " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return templates_from_json_text(buffer.str());
}

std::optional<TemplateId> select_template(const EntitySpan& span, const FeedbackConfig& config) {
  if (!span.confidence) {
    throw Error(ErrorCode::kMissingConfidence, "span has no confidence");
  }
  const bool confident = *span.confidence >= config.confidence_threshold;
  switch (span.label) {
    case EntityLabel::kEffort:
      return confident ? TemplateId::kEffortPraise : TemplateId::kEffortHedged;
    case EntityLabel::kOutcome:
      return confident ? TemplateId::kOutcomeRedirect : TemplateId::kOutcomeHedged;
    case EntityLabel::kPerson:
      if (confident) return TemplateId::kPersonRedirect;
      return std::nullopt;
  }
  return std::nullopt;
}

namespace {

const std::string& template_for(const FeedbackConfig& config, TemplateId id) {
  const auto it = config.templates.find(id);
  if (it == config.templates.end()) {
    throw Error(ErrorCode::kTemplateMissing, "no template for " + std::string(template_id_name(id)));
  }
  return it->second;
}

std::string substitute(std::string_view pattern, std::string_view quote) {
  std::string out;
  std::size_t pos = 0;
  for (;;) {
    const auto hit = pattern.find(kQuotePlaceholder, pos);
    if (hit == std::string_view::npos) break;
    out.append(pattern.substr(pos, hit - pos));
    out.append(quote);
    pos = hit + kQuotePlaceholder.size();
  }
  out.append(pattern.substr(pos));
  return out;
}

}  // namespace

FeedbackMessage render_feedback(std::string_view text, const TokenSequence& tokens,
                                const Prediction& prediction, const FeedbackConfig& config) {
  check_spans(prediction.spans, tokens.size());
  std::vector<EntitySpan> spans = prediction.spans;
  std::stable_sort(spans.begin(), spans.end(), span_less);

  FeedbackMessage message;
  std::vector<EntitySpan> surviving;
  for (const auto& span : spans) {
    const auto id = select_template(span, config);
    if (!id) continue;
    FeedbackItem item;
    item.span = span;
    item.template_id = *id;
    item.quote = span_text(text, tokens, span);
    item.text = substitute(template_for(config, *id), item.quote);
    item.char_start = tokens[span.token_start].char_start;
    item.char_end = tokens[span.token_end - 1].char_end;
    message.explain_prompt = message.explain_prompt || is_hedged(*id);
    message.items.push_back(std::move(item));
    surviving.push_back(span);
  }
  if (message.items.empty()) {
    FeedbackItem item;
    item.template_id = TemplateId::kNoPraise;
    item.text = substitute(template_for(config, TemplateId::kNoPraise), "");
    message.items.push_back(std::move(item));
  }
  message.verdict = classify_correctness(derive_labels(surviving));
  message.retry_prompt = config.allow_retry_prompt && message.verdict.verdict != Verdict::kDesired;
  return message;
}

}  // namespace praisetag

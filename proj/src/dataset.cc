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

#include "praisetag/dataset.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

#include "praisetag/bio.h"
#include "praisetag/error.h"

namespace praisetag {
namespace {

using ojson = nlohmann::ordered_json;

std::string at_line(std::size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  return out;
}

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

std::size_t get_index(const ojson& value, const char* field) {
  if (!value.is_number_integer() || (!value.is_number_unsigned() && value.get<std::int64_t>() < 0)) {
    throw Error(ErrorCode::kParse, std::string(field) + " must be a non-negative integer");
  }
  return value.get<std::size_t>();
}

EntitySpan parse_span(const ojson& item, bool need_confidence) {
  if (!item.is_object()) throw Error(ErrorCode::kParse, "span is not an object");
  if (!item.contains("label") || !item["label"].is_string()) {
    throw Error(ErrorCode::kParse, "span needs a string label");
  }
  const auto label = parse_label(item["label"].get<std::string>());
  if (!label) throw Error(ErrorCode::kParse, "unknown label " + item["label"].dump());
  if (!item.contains("token_start") || !item.contains("token_end")) {
    throw Error(ErrorCode::kParse, "span needs token_start and token_end");
  }
  EntitySpan span;
  span.label = *label;
  span.token_start = get_index(item["token_start"], "token_start");
  span.token_end = get_index(item["token_end"], "token_end");
  if (need_confidence) {
    if (!item.contains("confidence") || !item["confidence"].is_number()) {
      throw Error(ErrorCode::kMissingConfidence, "predicted span needs a numeric confidence");
    }
    const double c = item["confidence"].get<double>();
    if (!(c >= 0.0 && c <= 1.0)) throw Error(ErrorCode::kParse, "confidence outside [0, 1]");
    span.confidence = c;
  }
  return span;
}

ojson span_json(const EntitySpan& span) {
  ojson out;
  out["label"] = label_name(span.label);
  out["token_start"] = span.token_start;
  out["token_end"] = span.token_end;
  if (span.confidence) out["confidence"] = *span.confidence;
  return out;
}

AnnotatedResponse parse_response(const ojson& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::kParse, "expected a JSON object");
  if (!doc.contains("id") || !doc["id"].is_string()) throw Error(ErrorCode::kParse, "missing string \"id\"");
  if (!doc.contains("text") || !doc["text"].is_string()) {
    throw Error(ErrorCode::kParse, "missing string \"text\"");
  }
  std::vector<EntitySpan> spans;
  if (doc.contains("spans")) {
    if (!doc["spans"].is_array()) throw Error(ErrorCode::kParse, "\"spans\" must be an array");
    for (const auto& item : doc["spans"]) spans.push_back(parse_span(item, false));
  }
  Meta meta;
  if (doc.contains("meta")) {
    if (!doc["meta"].is_object()) throw Error(ErrorCode::kParse, "\"meta\" must be an object");
    for (const auto& [key, value] : doc["meta"].items()) {
      if (!value.is_string()) throw Error(ErrorCode::kParse, "meta values must be strings");
      meta[key] = value.get<std::string>();
    }
  }
  return AnnotatedResponse(doc["id"].get<std::string>(), doc["text"].get<std::string>(),
                           std::move(spans), std::move(meta));
}

std::string corpus_name_from(const std::filesystem::path& path) {
  return path.stem().string();
}

// Uniform integer in [0, bound] from raw 64-bit draws, by rejection.
std::uint64_t uniform_upto(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t range = bound + 1;
  if (range == 0) return rng();
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return draw % range;
}

// Fisher-Yates with an explicit draw rule so results do not depend on the
// standard library's distribution implementation.
void shuffle(std::vector<std::size_t>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_upto(rng, i - 1));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace

void Corpus::check_unique_ids() const {
  std::set<std::string_view> seen;
  for (const auto& r : responses) {
    if (!seen.insert(r.id()).second) {
      throw Error(ErrorCode::kInvariantViolation, "duplicate response id \"" + r.id() + "\"");
    }
  }
}

Corpus read_jsonl(std::istream& in, std::string name) {
  Corpus corpus;
  corpus.name = std::move(name);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (is_blank(line)) continue;
    ojson doc;
    try {
      doc = ojson::parse(line);
    } catch (const ojson::parse_error& e) {
      throw Error(ErrorCode::kParse, at_line(number, e.what()));
    }
    try {
      corpus.responses.push_back(parse_response(doc));
    } catch (const Error& e) {
      throw Error(e.code(), at_line(number, e.what()));
    }
  }
  corpus.check_unique_ids();
  return corpus;
}

Corpus load_jsonl(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_jsonl(in, corpus_name_from(path));
}

std::string response_to_json_line(const AnnotatedResponse& response) {
  ojson doc;
  doc["id"] = response.id();
  doc["text"] = response.text();
  ojson spans = ojson::array();
  for (const auto& span : response.gold_spans()) spans.push_back(span_json(span));
  doc["spans"] = std::move(spans);
  if (!response.meta().empty()) {
    ojson meta = ojson::object();
    for (const auto& [key, value] : response.meta()) meta[key] = value;
    doc["meta"] = std::move(meta);
  }
  return doc.dump(-1, ' ', false, ojson::error_handler_t::replace);
}

void write_jsonl(const Corpus& corpus, std::ostream& out) {
  for (const auto& response : corpus.responses) out << response_to_json_line(response) << '\n';
}

void save_jsonl(const Corpus& corpus, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_jsonl(corpus, out);
}

void write_conll(const Corpus& corpus, std::ostream& out) {
  for (const auto& response : corpus.responses) {
    out << "-DOCSTART- " << response.id() << '\n';
    const auto tags = spans_to_tags(response.tokens(), response.gold_spans());
    for (std::size_t i = 0; i < tags.size(); ++i) {
      out << response.tokens()[i].text << '\t' << tags[i].str() << '\n';
    }
    out << '\n';
  }
}

void export_conll(const Corpus& corpus, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_conll(corpus, out);
}

Corpus read_conll(std::istream& in, std::string name) {
  Corpus corpus;
  corpus.name = std::move(name);

  std::optional<std::string> id;
  std::vector<std::string> words;
  TagSequence tags;
  std::size_t doc_line = 0;

  auto finish = [&] {
    if (!id) return;
    std::string text;
    for (const auto& w : words) text += (text.empty() ? "" : " ") + w;
    const auto validation = validate_bio(tags);
    if (!validation.ok()) {
      const auto& v = validation.violations.front();
      throw Error(ErrorCode::kIllFormedTags,
                  "response \"" + *id + "\" tag " + std::to_string(v.index) + ": " + v.reason);
    }
    const auto spans = tags_to_spans(words.size(), tags);
    AnnotatedResponse response(*id, text, spans);
    bool same = response.tokens().size() == words.size();
    for (std::size_t i = 0; same && i < words.size(); ++i) same = response.tokens()[i].text == words[i];
    if (!same) {
      throw Error(ErrorCode::kParse,
                  at_line(doc_line, "tokens of \"" + *id + "\" do not re-tokenize to themselves"));
    }
    corpus.responses.push_back(std::move(response));
    id.reset();
    words.clear();
    tags.clear();
  };

  constexpr std::string_view kDocStart = "-DOCSTART-";
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      finish();
      continue;
    }
    if (line.starts_with(kDocStart)) {
      finish();
      std::string rest = line.substr(kDocStart.size());
      const auto begin = rest.find_first_not_of(" \t");
      if (begin == std::string::npos) throw Error(ErrorCode::kParse, at_line(number, "-DOCSTART- without id"));
      id = rest.substr(begin);
      doc_line = number;
      continue;
    }
    if (!id) throw Error(ErrorCode::kParse, at_line(number, "token line outside a -DOCSTART- block"));
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || line.find('\t', tab + 1) != std::string::npos) {
      throw Error(ErrorCode::kParse, at_line(number, "expected token<TAB>tag"));
    }
    const auto tag = BioTag::parse(std::string_view(line).substr(tab + 1));
    if (!tag) throw Error(ErrorCode::kParse, at_line(number, "unknown tag \"" + line.substr(tab + 1) + "\""));
    words.push_back(line.substr(0, tab));
    tags.push_back(*tag);
  }
  finish();
  corpus.check_unique_ids();
  return corpus;
}

Corpus import_conll(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_conll(in, corpus_name_from(path));
}

std::vector<Prediction> read_predictions(std::istream& in) {
  std::vector<Prediction> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (is_blank(line)) continue;
    try {
      const ojson doc = ojson::parse(line);
      if (!doc.is_object()) throw Error(ErrorCode::kParse, "expected a JSON object");
      if (!doc.contains("response_id") || !doc["response_id"].is_string()) {
        throw Error(ErrorCode::kParse, "missing string \"response_id\"");
      }
      Prediction p;
      p.response_id = doc["response_id"].get<std::string>();
      if (doc.contains("tagger_id")) {
        if (!doc["tagger_id"].is_string()) throw Error(ErrorCode::kParse, "\"tagger_id\" must be a string");
        p.tagger_id = doc["tagger_id"].get<std::string>();
      }
      if (doc.contains("latency_ms")) {
        p.latency_ms = static_cast<std::int64_t>(get_index(doc["latency_ms"], "latency_ms"));
      }
      if (!doc.contains("spans") || !doc["spans"].is_array()) {
        throw Error(ErrorCode::kParse, "missing \"spans\" array");
      }
      for (const auto& item : doc["spans"]) p.spans.push_back(parse_span(item, true));
      out.push_back(std::move(p));
    } catch (const ojson::exception& e) {
      throw Error(ErrorCode::kParse, at_line(number, e.what()));
    } catch (const Error& e) {
      throw Error(e.code(), at_line(number, e.what()));
    }
  }
  return out;
}

std::vector<Prediction> load_predictions(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_predictions(in);
}

std::string prediction_to_json_line(const Prediction& prediction) {
  ojson doc;
  doc["response_id"] = prediction.response_id;
  doc["tagger_id"] = prediction.tagger_id;
  doc["latency_ms"] = prediction.latency_ms;
  ojson spans = ojson::array();
  for (const auto& span : prediction.spans) spans.push_back(span_json(span));
  doc["spans"] = std::move(spans);
  return doc.dump(-1, ' ', false, ojson::error_handler_t::replace);
}

void write_predictions(const std::vector<Prediction>& predictions, std::ostream& out) {
  for (const auto& p : predictions) out << prediction_to_json_line(p) << '\n';
}

void SplitConfig::validate() const {
  double sum = 0.0;
  for (double r : ratios) {
    if (!(r > 0.0)) throw Error(ErrorCode::kInvalidArgument, "split ratios must be positive");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "split ratios must sum to 1");
  }
}

std::array<std::size_t, 3> split_sizes(std::size_t n, const std::array<double, 3>& ratios) {
  std::array<std::size_t, 3> sizes{};
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    // The epsilon keeps products like 10 * 0.7 = 6.9999... from flooring low.
    sizes[k] = static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratios[k] + 1e-9));
    assigned += sizes[k];
  }
  for (std::size_t k = 0; assigned < n; k = (k + 1) % 3, ++assigned) ++sizes[k];
  return sizes;
}

namespace {

// Per-group part sizes whose column totals equal split_sizes(n). Each cell
// starts at the floor of its ideal share; the remaining units go to the
// cells with the largest fractional parts (train first on ties) while both
// the group and the part still lack members.
std::vector<std::array<std::size_t, 3>> group_quotas(const std::vector<std::size_t>& group_sizes,
                                                     const std::array<double, 3>& ratios) {
  std::size_t n = 0;
  for (std::size_t size : group_sizes) n += size;
  const auto totals = split_sizes(n, ratios);

  std::vector<std::array<std::size_t, 3>> quotas(group_sizes.size());
  std::vector<std::size_t> row_left(group_sizes.size());
  std::array<std::size_t, 3> column_left = totals;
  struct Cell {
    double fraction;
    std::size_t part;
    std::size_t group;
  };
  std::vector<Cell> cells;
  for (std::size_t g = 0; g < group_sizes.size(); ++g) {
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < 3; ++k) {
      const double ideal = static_cast<double>(group_sizes[g]) * ratios[k];
      quotas[g][k] = static_cast<std::size_t>(std::floor(ideal + 1e-9));
      assigned += quotas[g][k];
      column_left[k] -= std::min(column_left[k], quotas[g][k]);
      cells.push_back({ideal - static_cast<double>(quotas[g][k]), k, g});
    }
    row_left[g] = group_sizes[g] - assigned;
  }
  std::stable_sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    if (a.fraction != b.fraction) return a.fraction > b.fraction;
    return a.part < b.part;
  });
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& c : cells) {
      // The second pass ignores column totals so every member gets a part.
      if (row_left[c.group] == 0 || (pass == 0 && column_left[c.part] == 0)) continue;
      ++quotas[c.group][c.part];
      --row_left[c.group];
      if (column_left[c.part] > 0) --column_left[c.part];
    }
  }
  return quotas;
}

}  // namespace

CorpusSplit split_dataset(const Corpus& corpus, const SplitConfig& config) {
  config.validate();
  const std::size_t n = corpus.responses.size();
  if (n < 3) throw Error(ErrorCode::kEmptyInput, "splitting needs at least 3 responses");

  std::vector<std::vector<std::size_t>> groups;
  if (config.stratify) {
    std::map<int, std::vector<std::size_t>> by_combination;
    for (std::size_t i = 0; i < n; ++i) {
      const auto labels = derive_labels(corpus.responses[i].gold_spans());
      const int key = (labels.effort ? 1 : 0) | (labels.outcome ? 2 : 0) | (labels.person ? 4 : 0);
      by_combination[key].push_back(i);
    }
    for (auto& [key, members] : by_combination) groups.push_back(std::move(members));
  } else {
    groups.emplace_back(n);
    for (std::size_t i = 0; i < n; ++i) groups[0][i] = i;
  }

  std::vector<std::size_t> group_sizes;
  for (const auto& members : groups) group_sizes.push_back(members.size());
  const auto quotas = group_quotas(group_sizes, config.ratios);

  std::mt19937_64 rng(config.seed);
  std::array<std::vector<std::size_t>, 3> parts;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    auto& members = groups[g];
    shuffle(members, rng);
    const auto& sizes = quotas[g];
    std::size_t pos = 0;
    for (std::size_t k = 0; k < 3; ++k) {
      parts[k].insert(parts[k].end(), members.begin() + static_cast<std::ptrdiff_t>(pos),
                      members.begin() + static_cast<std::ptrdiff_t>(pos + sizes[k]));
      pos += sizes[k];
    }
  }

  CorpusSplit split;
  Corpus* outputs[3] = {&split.train, &split.validation, &split.test};
  const char* suffixes[3] = {".train", ".validation", ".test"};
  for (std::size_t k = 0; k < 3; ++k) {
    std::sort(parts[k].begin(), parts[k].end());
    outputs[k]->name = corpus.name + suffixes[k];
    for (std::size_t i : parts[k]) outputs[k]->responses.push_back(corpus.responses[i]);
  }
  return split;
}

std::size_t TagDistribution::total() const {
  std::size_t sum = 0;
  for (auto c : counts) sum += c;
  return sum;
}

double TagDistribution::rounded_percentage(std::size_t key_index) const {
  return std::round(percentages[key_index] * 10.0) / 10.0;
}

std::size_t TagDistribution::count(std::string_view key) const {
  for (std::size_t i = 0; i < kDistributionKeys.size(); ++i) {
    if (kDistributionKeys[i] == key) return counts[i];
  }
  return 0;
}

TagDistribution compute_stats(const Corpus& corpus) {
  if (corpus.responses.empty()) throw Error(ErrorCode::kEmptyInput, "corpus is empty");
  TagDistribution dist;
  for (const auto& response : corpus.responses) {
    for (const BioTag& tag : spans_to_tags(response.tokens(), response.gold_spans())) {
      const std::string key = tag.str();
      for (std::size_t i = 0; i < kDistributionKeys.size(); ++i) {
        if (kDistributionKeys[i] == key) ++dist.counts[i];
      }
    }
  }
  const double total = static_cast<double>(dist.total());
  for (std::size_t i = 0; i < dist.counts.size(); ++i) {
    dist.percentages[i] = total > 0 ? 100.0 * static_cast<double>(dist.counts[i]) / total : 0.0;
  }
  return dist;
}

}  // namespace praisetag

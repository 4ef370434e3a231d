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

#ifndef PRAISETAG_DATASET_H_
#define PRAISETAG_DATASET_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "praisetag/annotation.h"
#include "praisetag/tagging.h"

namespace praisetag {

struct Corpus {
  std::string name;
  std::vector<AnnotatedResponse> responses;

  // Throws kInvariantViolation on duplicate ids.
  void check_unique_ids() const;
};

// JSONL, one response per line:
//   {"id": "...", "text": "...", "spans": [{"label": "...", "token_start": 0,
//    "token_end": 2}], "meta": {...}}
// "spans" and "meta" are optional on input; blank lines are skipped. Errors
// carry the 1-based line number or the response id.
Corpus read_jsonl(std::istream& in, std::string name);
Corpus load_jsonl(const std::filesystem::path& path);
void write_jsonl(const Corpus& corpus, std::ostream& out);
void save_jsonl(const Corpus& corpus, const std::filesystem::path& path);

std::string response_to_json_line(const AnnotatedResponse& response);

// CoNLL-style columns: "-DOCSTART- <id>", then "token<TAB>tag" per line,
// blank line between responses. Original spacing and meta are not kept;
// imported text joins tokens with single spaces.
void write_conll(const Corpus& corpus, std::ostream& out);
void export_conll(const Corpus& corpus, const std::filesystem::path& path);
Corpus read_conll(std::istream& in, std::string name);
Corpus import_conll(const std::filesystem::path& path);

// Prediction JSONL, one per line:
//   {"response_id": "...", "tagger_id": "...", "latency_ms": 0,
//    "spans": [{"label": ..., "token_start": ..., "token_end": ...,
//    "confidence": ...}]}
std::vector<Prediction> read_predictions(std::istream& in);
std::vector<Prediction> load_predictions(const std::filesystem::path& path);
void write_predictions(const std::vector<Prediction>& predictions, std::ostream& out);
std::string prediction_to_json_line(const Prediction& prediction);

struct SplitConfig {
  std::array<double, 3> ratios{0.7, 0.1, 0.2};  // train, validation, test
  std::uint64_t seed = 0;
  bool stratify = false;  // shuffle and cut within each label combination

  // Throws kInvalidArgument unless every ratio is > 0 and they sum to 1.
  void validate() const;
};

struct CorpusSplit {
  Corpus train;
  Corpus validation;
  Corpus test;
};

// Part sizes are floor(n * ratio); the leftover items go to train, then
// validation, then test. Each part keeps corpus order. Throws kEmptyInput
// for corpora with fewer than 3 responses.
CorpusSplit split_dataset(const Corpus& corpus, const SplitConfig& config);

// Split sizes for `n` items under the floor-and-leftover rule.
std::array<std::size_t, 3> split_sizes(std::size_t n, const std::array<double, 3>& ratios);

inline constexpr std::array<std::string_view, 7> kDistributionKeys = {
    "O", "B-Outcome", "I-Outcome", "B-Effort", "I-Effort", "B-Person", "I-Person"};

struct TagDistribution {
  std::array<std::size_t, 7> counts{};  // indexed like kDistributionKeys
  std::array<double, 7> percentages{};  // 100 * count / total, unrounded

  std::size_t total() const;
  // Percentage rounded half-up to one decimal.
  double rounded_percentage(std::size_t key_index) const;
  std::size_t count(std::string_view key) const;
};

// Tag counts over every response's gold tag sequence. Throws kEmptyInput.
TagDistribution compute_stats(const Corpus& corpus);

}  // namespace praisetag

#endif  // PRAISETAG_DATASET_H_

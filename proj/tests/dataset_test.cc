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


#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "praisetag/dataset.h"
#include "praisetag/error.h"
#include "praisetag/tagging.h"
#include "testing.h"

namespace praisetag {
namespace {

using testing::effort;
using testing::outcome;

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "praisetag_dataset_test";
  std::filesystem::create_directories(dir);
  return dir;
}

std::set<std::string> ids(const Corpus& corpus) {
  std::set<std::string> out;
  for (const auto& r : corpus.responses) out.insert(r.id());
  return out;
}

std::string serialize(const Corpus& corpus) {
  std::ostringstream out;
  write_jsonl(corpus, out);
  return out.str();
}

TEST_CASE("read a JSONL line") {
  std::istringstream in(
      R"({"id":"r1","text":"Great job!","spans":[{"label":"Outcome","token_start":0,"token_end":2}]})"
      "\n");
  const Corpus corpus = read_jsonl(in, "mini");
  REQUIRE(corpus.responses.size() == 1);
  const auto& r = corpus.responses[0];
  CHECK(r.id() == "r1");
  CHECK(r.gold_spans() == std::vector<EntitySpan>{outcome(0, 2)});
}

TEST_CASE("JSONL errors carry line numbers or ids") {
  std::istringstream out_of_range(
      "\n"
      R"({"id":"r1","text":"Great job!","spans":[{"label":"Outcome","token_start":0,"token_end":99}]})");
  try {
    read_jsonl(out_of_range, "bad");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvariantViolation);
    CHECK(std::string(e.what()).find("r1") != std::string::npos);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }

  std::istringstream garbage("{\"id\":\"a\",\"text\":\"x\",\"spans\":[]}\nnot json\n");
  try {
    read_jsonl(garbage, "bad");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParse);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }

  std::istringstream duplicate(
      "{\"id\":\"a\",\"text\":\"x\",\"spans\":[]}\n{\"id\":\"a\",\"text\":\"y\",\"spans\":[]}\n");
  CHECK_THROWS_AS(read_jsonl(duplicate, "dup"), Error);

  std::istringstream bad_label(
      R"({"id":"a","text":"x y","spans":[{"label":"Smart","token_start":0,"token_end":1}]})");
  CHECK_THROWS_AS(read_jsonl(bad_label, "bad"), Error);
}

TEST_CASE("JSONL save/load round trip on the fixtures") {
  for (const char* name : {"praise_fixture.jsonl", "tag_distribution_fixture.jsonl",
                           "case_study_gold.jsonl"}) {
    CAPTURE(name);
    const Corpus corpus = load_jsonl(testing::data_path(name));
    const auto path = temp_dir() / name;
    save_jsonl(corpus, path);
    const Corpus again = load_jsonl(path);
    CHECK(again.responses == corpus.responses);
    CHECK(serialize(again) == serialize(corpus));

    // Canonical serialization reproduces the generated files byte for byte.
    std::ifstream in(testing::data_path(name), std::ios::binary);
    std::stringstream original;
    original << in.rdbuf();
    CHECK(serialize(corpus) == original.str());
  }
}

TEST_CASE("CoNLL export") {
  Corpus corpus{"mini", {AnnotatedResponse("r1", "You are doing a great job", {outcome(4, 6)})}};
  std::ostringstream out;
  write_conll(corpus, out);
  CHECK(out.str() ==
        "-DOCSTART- r1\nYou\tO\nare\tO\ndoing\tO\na\tO\ngreat\tB-Outcome\njob\tI-Outcome\n\n");

  std::ostringstream empty;
  write_conll(Corpus{"empty", {}}, empty);
  CHECK(empty.str().empty());
}

TEST_CASE("CoNLL import rejects ill-formed tags") {
  std::istringstream in("-DOCSTART- r1\nYou\tO\nrock\tI-Outcome\n\n");
  try {
    read_conll(in, "bad");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIllFormedTags);
  }
}

TEST_CASE("CoNLL round trip preserves spans on the fixtures") {
  for (const char* name : {"praise_fixture.jsonl", "tag_distribution_fixture.jsonl",
                           "case_study_gold.jsonl"}) {
    CAPTURE(name);
    const Corpus corpus = load_jsonl(testing::data_path(name));
    const auto path = temp_dir() / (std::string(name) + ".conll");
    export_conll(corpus, path);
    const Corpus back = import_conll(path);
    REQUIRE(back.responses.size() == corpus.responses.size());
    for (std::size_t i = 0; i < corpus.responses.size(); ++i) {
      CHECK(back.responses[i].id() == corpus.responses[i].id());
      CHECK(back.responses[i].gold_spans() == corpus.responses[i].gold_spans());
      CHECK(back.responses[i].tokens().size() == corpus.responses[i].tokens().size());
    }
  }
}

TEST_CASE("prediction files") {
  std::vector<Prediction> predictions{{"a", {EntitySpan{EntityLabel::kEffort, 0, 2, 0.75}}, "x", 3},
                                      {"b", {}, "x", 0}};
  std::ostringstream out;
  write_predictions(predictions, out);
  std::istringstream in(out.str());
  CHECK(read_predictions(in) == predictions);

  std::istringstream no_confidence(
      R"({"response_id":"a","spans":[{"label":"Effort","token_start":0,"token_end":1}]})");
  try {
    read_predictions(no_confidence);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingConfidence);
  }
}

TEST_CASE("split sizes") {
  const std::array<double, 3> ratios{0.7, 0.1, 0.2};
  CHECK(split_sizes(10, ratios) == std::array<std::size_t, 3>{7, 1, 2});
  CHECK(split_sizes(129, ratios) == std::array<std::size_t, 3>{91, 13, 25});
  CHECK(split_sizes(0, ratios) == std::array<std::size_t, 3>{0, 0, 0});

  SplitConfig bad;
  bad.ratios = {0.5, 0.5, 0.0};
  CHECK_THROWS_AS(bad.validate(), Error);
  bad.ratios = {0.7, 0.2, 0.2};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("property: split sizes follow floor then train-first leftovers") {
  std::mt19937_64 rng(51);
  std::uniform_int_distribution<std::size_t> size(0, 500);
  std::uniform_int_distribution<int> weight(1, 20);
  for (int round = 0; round < 2000; ++round) {
    const double a = weight(rng), b = weight(rng), c = weight(rng);
    const std::array<double, 3> ratios{a / (a + b + c), b / (a + b + c), c / (a + b + c)};
    const std::size_t n = size(rng);
    const auto sizes = split_sizes(n, ratios);
    REQUIRE(sizes[0] + sizes[1] + sizes[2] == n);
    for (std::size_t k = 0; k < 3; ++k) {
      const auto floor = static_cast<std::size_t>(std::floor(n * ratios[k] + 1e-9));
      REQUIRE(sizes[k] >= floor);
      REQUIRE(sizes[k] <= floor + 1);
    }
    // Leftovers go to the earlier parts first.
    REQUIRE((sizes[1] == static_cast<std::size_t>(std::floor(n * ratios[1] + 1e-9)) ||
             sizes[0] > static_cast<std::size_t>(std::floor(n * ratios[0] + 1e-9))));
  }
}

TEST_CASE("split of the 129-response fixture") {
  const Corpus corpus = load_jsonl(testing::data_path("praise_fixture.jsonl"));
  REQUIRE(corpus.responses.size() == 129);
  SplitConfig config;
  config.seed = 7;
  const auto a = split_dataset(corpus, config);
  CHECK(a.train.responses.size() == 91);
  CHECK(a.validation.responses.size() == 13);
  CHECK(a.test.responses.size() == 25);

  const auto b = split_dataset(corpus, config);
  CHECK(ids(a.train) == ids(b.train));
  CHECK(ids(a.validation) == ids(b.validation));
  CHECK(ids(a.test) == ids(b.test));
  CHECK(serialize(a.train) == serialize(b.train));

  config.seed = 8;
  CHECK(ids(split_dataset(corpus, config).train) != ids(a.train));

  std::set<std::string> all = ids(a.train);
  for (const auto& id : ids(a.validation)) CHECK(all.insert(id).second);
  for (const auto& id : ids(a.test)) CHECK(all.insert(id).second);
  CHECK(all == ids(corpus));
}

TEST_CASE("stratified split keeps every label combination near 70% train") {
  const Corpus corpus = load_jsonl(testing::data_path("praise_fixture.jsonl"));
  auto group_of = [](const AnnotatedResponse& r) {
    const auto labels = derive_labels(r.gold_spans());
    return int(labels.effort) | int(labels.outcome) << 1 | int(labels.person) << 2;
  };
  std::map<int, std::size_t> totals;
  for (const auto& r : corpus.responses) ++totals[group_of(r)];
  // effort only, both, outcome only, neither
  CHECK(totals == std::map<int, std::size_t>{{0, 22}, {1, 52}, {2, 26}, {3, 29}});

  for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, 20230701ULL}) {
    SplitConfig config;
    config.seed = seed;
    config.stratify = true;
    const auto split = split_dataset(corpus, config);
    CHECK(split.train.responses.size() + split.validation.responses.size() +
              split.test.responses.size() ==
          129);
    std::map<int, std::size_t> train;
    for (const auto& r : split.train.responses) ++train[group_of(r)];
    for (const auto& [group, total] : totals) {
      CAPTURE(group);
      CHECK(std::abs(double(train[group]) - 0.7 * double(total)) <= 1.0);
    }
  }
}

TEST_CASE("tag distribution") {
  Corpus one{"one", {AnnotatedResponse("r", "Great job!", {outcome(0, 2)})}};
  auto stats = compute_stats(one);
  CHECK(stats.total() == 3);
  CHECK(stats.count("B-Outcome") == 1);
  CHECK(stats.count("I-Outcome") == 1);
  CHECK(stats.count("O") == 1);
  CHECK(stats.rounded_percentage(0) == doctest::Approx(33.3));

  Corpus plain{"plain", {AnnotatedResponse("r", "Let's work together.", {})}};
  stats = compute_stats(plain);
  CHECK(stats.percentages[0] == 100.0);

  CHECK_THROWS_AS(compute_stats(Corpus{"empty", {}}), Error);
}

TEST_CASE("tag distribution fixture") {
  const auto stats = compute_stats(load_jsonl(testing::data_path("tag_distribution_fixture.jsonl")));
  CHECK(stats.count("O") == 2380);
  CHECK(stats.count("B-Outcome") == 53);
  CHECK(stats.count("I-Outcome") == 114);
  CHECK(stats.count("B-Effort") == 80);
  CHECK(stats.count("I-Effort") == 484);
  CHECK(stats.total() == 3111);
  double sum = 0;
  for (double p : stats.percentages) sum += p;
  CHECK(std::abs(sum - 100.0) < 0.1);
  for (std::size_t i = 0; i < kDistributionKeys.size(); ++i) {
    CHECK(stats.percentages[i] == doctest::Approx(100.0 * stats.counts[i] / 3111.0));
  }
}

}  // namespace
}  // namespace praisetag

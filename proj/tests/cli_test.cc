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


#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.h"
#include "doctest.h"
#include "json.hpp"
#include "praisetag/dataset.h"
#include "praisetag/tagging.h"
#include "testing.h"

namespace praisetag {
namespace {

using nlohmann::json;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args, const std::string& input = "") {
  args.insert(args.begin(), "praisetag");
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = cli::run(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "praisetag_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string data(const std::string& name) { return testing::data_path(name).string(); }

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == cli::kUsage);
  CHECK(run({"frobnicate"}).code == cli::kUsage);
  CHECK(run({"tag"}).code == cli::kUsage);
  CHECK(run({"split", "--in", data("praise_fixture.jsonl"), "--ratios", "0.5,0.5"}).code ==
        cli::kUsage);
  CHECK(run({"eval", "--gold", data("case_study_gold.jsonl"), "--pred",
             data("case_study_pred.jsonl"), "--tau", "0"})
            .code == cli::kUsage);
  CHECK(run({"tag", "--in", data("praise_fixture.jsonl"), "--tagger", "external"}).code ==
        cli::kUsage);
  CHECK(run({"--help"}).code == cli::kOk);
}

TEST_CASE("tag with the default lexicon covers every quoted phrase") {
  const auto r = run({"tag", "--in", data("praise_fixture.jsonl")});
  REQUIRE(r.code == cli::kOk);
  std::istringstream lines(r.out);
  const auto predictions = read_predictions(lines);
  const Corpus corpus = load_jsonl(testing::data_path("praise_fixture.jsonl"));
  REQUIRE(predictions.size() == corpus.responses.size());

  const Lexicon lexicon = Lexicon::default_lexicon();
  std::size_t phrases = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto& response = corpus.responses[i];
    CHECK(predictions[i].response_id == response.id());
    CHECK(predictions[i].tagger_id == "lexicon");
    const auto& tokens = response.tokens();
    for (const auto& entry : lexicon.entries()) {
      if (entry.confidence < 0.9) continue;
      for (std::size_t start = 0; start + entry.pattern.size() <= tokens.size(); ++start) {
        bool hit = true;
        for (std::size_t k = 0; k < entry.pattern.size() && hit; ++k) {
          std::string word = tokens[start + k].text;
          for (auto& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
          hit = word == entry.pattern[k];
        }
        if (!hit) continue;
        ++phrases;
        bool covered = false;
        for (const auto& s : predictions[i].spans) {
          covered |= s.token_start <= start && start + entry.pattern.size() <= s.token_end;
        }
        CAPTURE(response.text());
        CHECK(covered);
      }
    }
  }
  CHECK(phrases > 50);

  // Byte-identical on a second run.
  CHECK(run({"tag", "--in", data("praise_fixture.jsonl")}).out == r.out);
}

TEST_CASE("tag edge cases") {
  const auto empty = scratch("empty.jsonl");
  std::ofstream(empty).close();
  auto r = run({"tag", "--in", empty.string()});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.empty());

  r = run({"tag", "--in", "/nonexistent/responses.jsonl"});
  CHECK(r.code == cli::kDataError);
  CHECK(r.err.find("/nonexistent/responses.jsonl") != std::string::npos);

  r = run({"tag", "--in", "-"}, "not json\n");
  CHECK(r.code == cli::kDataError);

  r = run({"tag", "--in", "-", "--tagger", "external", "--adapter",
           std::string("stdio:") + PRAISETAG_FAKE_ADAPTER + " crash", "--timeout-ms", "2000"},
          R"({"id":"a","text":"Good job!","spans":[]})"
          "\n");
  CHECK(r.code == cli::kAdapterError);

  r = run({"tag", "--in", "-", "--tagger", "external", "--adapter",
           std::string("stdio:") + PRAISETAG_FAKE_ADAPTER + " spans []"},
          R"({"id":"a","text":"Good job!","spans":[]})"
          "\n");
  CHECK(r.code == cli::kOk);
  CHECK(json::parse(r.out)["tagger_id"] == "external");
}

TEST_CASE("eval") {
  auto r = run({"eval", "--gold", data("case_study_gold.jsonl"), "--pred",
                data("case_study_pred.jsonl"), "--format", "json"});
  REQUIRE(r.code == cli::kOk);
  const auto doc = json::parse(r.out);
  CHECK(doc["runs"][0]["cases"] ==
        json{{"Accurate", 1}, {"Inaccurate", 1}, {"PartiallyAccurate", 1}, {"AccurateNone", 1}});

  r = run({"eval", "--gold", data("case_study_gold.jsonl"), "--pred",
           data("case_study_pred.jsonl")});
  REQUIRE(r.code == cli::kOk);
  CHECK(r.out.find("PartiallyAccurate  1") != std::string::npos);

  // gold scored against itself
  const Corpus gold = load_jsonl(testing::data_path("praise_fixture.jsonl"));
  std::vector<Prediction> self;
  for (const auto& response : gold.responses) {
    Prediction p{response.id(), response.gold_spans(), "gold", 0};
    for (auto& s : p.spans) s.confidence = 1.0;
    self.push_back(p);
  }
  const auto self_path = scratch("self.jsonl");
  {
    std::ofstream out(self_path);
    write_predictions(self, out);
  }
  r = run({"eval", "--gold", data("praise_fixture.jsonl"), "--pred", self_path.string()});
  REQUIRE(r.code == cli::kOk);
  CHECK(r.out.find("micro") != std::string::npos);
  CHECK(r.out.find("1.000") != std::string::npos);
  CHECK(r.out.find("0.500") == std::string::npos);

  r = run({"eval", "--gold", data("praise_fixture.jsonl"), "--pred", data("case_study_pred.jsonl")});
  CHECK(r.code == cli::kDataError);
  r = run({"eval", "--gold", data("praise_fixture.jsonl"), "--pred", "/nonexistent/p.jsonl"});
  CHECK(r.code == cli::kDataError);
}

TEST_CASE("eval over ten prediction files") {
  std::vector<std::string> args{"eval", "--gold", data("case_study_gold.jsonl")};
  for (int i = 0; i < 10; ++i) {
    args.push_back("--pred");
    args.push_back(data("case_study_pred.jsonl"));
  }
  const auto r = run(args);
  REQUIRE(r.code == cli::kOk);
  CHECK(r.out.find("(mean ± std over 10 runs)") != std::string::npos);
}

TEST_CASE("split") {
  const auto dir = scratch("split");
  std::filesystem::remove_all(dir);
  auto r = run({"split", "--in", data("praise_fixture.jsonl"), "--ratios", "0.7,0.1,0.2",
                "--seed", "5", "--out-dir", dir.string()});
  REQUIRE(r.code == cli::kOk);
  CHECK(load_jsonl(dir / "praise_fixture.train.jsonl").responses.size() == 91);
  CHECK(load_jsonl(dir / "praise_fixture.validation.jsonl").responses.size() == 13);
  CHECK(load_jsonl(dir / "praise_fixture.test.jsonl").responses.size() == 25);
  const std::string first = slurp(dir / "praise_fixture.train.jsonl");

  r = run({"split", "--in", data("praise_fixture.jsonl"), "--seed", "5", "--out-dir", dir.string()});
  REQUIRE(r.code == cli::kOk);
  CHECK(slurp(dir / "praise_fixture.train.jsonl") == first);

  r = run({"split", "--in", data("praise_fixture.jsonl"), "--seed", "5", "--stratify", "--out-dir",
           dir.string()});
  REQUIRE(r.code == cli::kOk);
  CHECK(r.out.find("\t91\n") != std::string::npos);
}

TEST_CASE("stats") {
  auto r = run({"stats", "--in", data("tag_distribution_fixture.jsonl")});
  REQUIRE(r.code == cli::kOk);
  for (const char* line : {"76.5%", "1.7%", "3.7%", "2.6%", "15.6%"}) {
    CHECK(r.out.find(line) != std::string::npos);
  }
  r = run({"stats", "--in", data("tag_distribution_fixture.jsonl"), "--format", "json"});
  REQUIRE(r.code == cli::kOk);
  CHECK(json::parse(r.out)["percentages"]["I-Effort"] == 15.6);
}

TEST_CASE("convert round trip") {
  const auto conll = scratch("fixture.conll");
  REQUIRE(run({"convert", "--in", data("praise_fixture.jsonl"), "--to", "conll", "--out",
               conll.string()})
              .code == cli::kOk);
  const auto back = run({"convert", "--in", conll.string(), "--to", "jsonl"});
  REQUIRE(back.code == cli::kOk);
  std::istringstream in(back.out);
  const Corpus restored = read_jsonl(in, "restored");
  const Corpus original = load_jsonl(testing::data_path("praise_fixture.jsonl"));
  REQUIRE(restored.responses.size() == original.responses.size());
  for (std::size_t i = 0; i < original.responses.size(); ++i) {
    CHECK(restored.responses[i].gold_spans() == original.responses[i].gold_spans());
  }
  CHECK(run({"convert", "--in", "-", "--to", "jsonl"}, "x\tI-Effort\n").code == cli::kDataError);
}

TEST_CASE("feedback") {
  auto r = run({"feedback", "--text", testing::kMixedPraiseText});
  REQUIRE(r.code == cli::kOk);
  CHECK(r.out ==
        "Saying \"Good job\" is praising students for the outcome. You should focus on praising "
        "the students for their effort and process towards learning. Do you want to try "
        "responding again?\n"
        "Saying \"stuck with it\" is a nice example of process-focused praise, which praises "
        "students for their effort.\n");

  r = run({"feedback", "--text", testing::kMixedPraiseText, "--threshold", "0.95", "--format", "json"});
  REQUIRE(r.code == cli::kOk);
  const auto doc = json::parse(r.out);
  CHECK(doc["items"][0]["template_id"] == "OutcomeHedged");
  CHECK(doc["items"][1]["template_id"] == "EffortHedged");
  CHECK(doc["explain_prompt"] == true);

  CHECK(run({"feedback", "--text", "hi", "--templates", "/nonexistent/t.json"}).code ==
        cli::kDataError);
}

TEST_CASE("serve with a bad config") {
  CHECK(run({"serve", "--config", "/nonexistent/config.json"}).code == cli::kDataError);
}

}  // namespace
}  // namespace praisetag

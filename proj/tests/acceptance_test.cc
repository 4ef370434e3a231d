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


// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "praisetag/adapter.h"
#include "praisetag/bio.h"
#include "praisetag/dataset.h"
#include "praisetag/evaluation.h"
#include "praisetag/feedback.h"
#include "praisetag/service.h"
#include "praisetag/tokenizer.h"
#include "testing.h"

namespace praisetag {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void expect(bool ok, const std::string& what) {
  if (!ok) throw Failure(what);
}

struct Criterion {
  std::string name;
  double limit_ms;
  std::function<std::string()> check;  // returns a short detail line
};

bool same_counts(const MetricCounts& a, const MetricCounts& b) {
  for (EntityLabel label : kAllLabels) {
    if (!(a.at(label) == b.at(label))) return false;
  }
  if (a.outside.has_value() != b.outside.has_value()) return false;
  return !a.outside || *a.outside == *b.outside;
}

std::string tag_distribution() {
  const auto stats = compute_stats(load_jsonl(testing::data_path("tag_distribution_fixture.jsonl")));
  const std::map<std::string, std::pair<std::size_t, int>> expected{
      {"O", {2380, 765}}, {"B-Outcome", {53, 17}}, {"I-Outcome", {114, 37}},
      {"B-Effort", {80, 26}}, {"I-Effort", {484, 156}}};
  std::ostringstream detail;
  for (std::size_t i = 0; i < kDistributionKeys.size(); ++i) {
    const std::string key(kDistributionKeys[i]);
    const auto it = expected.find(key);
    if (it == expected.end()) continue;
    expect(stats.counts[i] == it->second.first, key + " count " + std::to_string(stats.counts[i]));
    const int tenths = static_cast<int>(std::lround(stats.rounded_percentage(i) * 10));
    expect(tenths == it->second.second, key + " percentage " + std::to_string(stats.rounded_percentage(i)));
    detail << key << ' ' << tenths / 10 << '.' << tenths % 10 << ' ';
  }
  return detail.str();
}

std::string case_study() {
  const Corpus gold = load_jsonl(testing::data_path("case_study_gold.jsonl"));
  const auto preds = load_predictions(testing::data_path("case_study_pred.jsonl"));
  expect(gold.responses.size() == 4 && preds.size() == 4, "four cases expected");
  const CaseCategory expected[] = {CaseCategory::kAccurate, CaseCategory::kInaccurate,
                                   CaseCategory::kPartiallyAccurate, CaseCategory::kAccurateNone};
  // Spot-check the encodings against the quoted phrases.
  const auto& case3 = gold.responses[2];
  expect(span_text(case3, case3.gold_spans()[0]) == "you got the right answer", "case 3 gold span 1");
  expect(span_text(case3, case3.gold_spans()[1]) == "you stuck with it", "case 3 gold span 2");
  expect(span_text(case3, case3.gold_spans()[2]) == "Good job", "case 3 gold span 3");
  expect(span_text(case3, preds[2].spans[2]) == "I'm proud of what you have done", "case 3 extra pred");
  expect(span_text(gold.responses[1], gold.responses[1].gold_spans()[0]) == "doing great so far",
         "case 2 gold span");

  std::string detail;
  for (std::size_t i = 0; i < 4; ++i) {
    expect(preds[i].response_id == gold.responses[i].id(), "id order");
    const auto got = categorize_case(gold.responses[i].gold_spans(), preds[i].spans, 0.5);
    expect(got == expected[i], gold.responses[i].id() + " -> " + std::string(case_category_name(got)));
    detail += std::string(case_category_name(got)) + " ";
  }
  return detail;
}

std::string metric_oracle() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<std::size_t> length(0, 50);
  constexpr int kPairs = 2000;
  for (int round = 0; round < kPairs; ++round) {
    const std::size_t n = length(rng);
    TagSequence gold, pred;
    if (round % 2 == 0) {
      gold = testing::random_tags(rng, n);
      pred = testing::random_tags(rng, n);
    } else {
      gold = spans_to_tags(n, testing::random_spans(rng, n));
      pred = spans_to_tags(n, testing::random_spans(rng, n));
    }
    for (bool exclude : {true, false}) {
      expect(same_counts(token_counts(gold, pred, exclude),
                         testing::brute_force_token_counts(gold, pred, exclude)),
             "mismatch at pair " + std::to_string(round));
      const auto report = token_metrics(gold, pred, exclude);
      const auto oracle = testing::brute_force_token_counts(gold, pred, exclude).report();
      expect(report.counts == oracle.counts, "report counts at pair " + std::to_string(round));
    }
  }
  return std::to_string(kPairs) + " pairs x 2 modes";
}

std::string partial_equivalence() {
  std::mt19937_64 rng(102);
  std::uniform_int_distribution<std::size_t> length(0, 40);
  constexpr int kPairs = 2000;
  for (int round = 0; round < kPairs; ++round) {
    const std::size_t n = length(rng);
    const auto gold = testing::random_spans(rng, n);
    // Every third prediction is a perturbed copy so exact hits are common.
    auto pred = testing::random_spans(rng, n);
    if (round % 3 == 0) pred = gold;
    const auto partial = partial_metrics(gold, pred, 1.0);
    const auto exact = span_exact_metrics(gold, pred);
    expect(same_counts(partial_counts(gold, pred, 1.0), span_exact_counts(gold, pred)),
           "counts differ at pair " + std::to_string(round));
    expect(partial.micro.f1 == exact.micro.f1 && partial.macro.f1 == exact.macro.f1,
           "scores differ at pair " + std::to_string(round));
  }
  return std::to_string(kPairs) + " pairs";
}

std::string bio_suite() {
  std::mt19937_64 rng(103);
  std::uniform_int_distribution<std::size_t> length(0, 40);
  constexpr int kSequences = 10000;
  for (int round = 0; round < kSequences; ++round) {
    const std::size_t n = length(rng);
    const auto spans = testing::random_spans(rng, n);
    const auto tags = spans_to_tags(n, spans);
    expect(tags_to_spans(n, tags) == spans, "round trip failed at " + std::to_string(round));

    const auto raw = testing::random_tags(rng, n);
    const auto repaired = repair_bio(raw);
    expect(validate_bio(repaired).ok(), "repaired output invalid at " + std::to_string(round));
    expect(repair_bio(repaired) == repaired, "repair not idempotent at " + std::to_string(round));
    const auto v1 = validate_bio(raw).violations;
    const auto v2 = validate_bio(raw).violations;
    expect(v1 == v2, "validate not deterministic at " + std::to_string(round));
    expect(validate_bio(tags).ok() && repair_bio(tags) == tags, "valid tags changed by repair");
  }
  return std::to_string(kSequences) + " span sets + " + std::to_string(kSequences) + " raw sequences";
}

// Runs `service` behind a real HTTP server on an ephemeral port.
class LiveServer {
 public:
  explicit LiveServer(const Service& service) {
    service.mount(server_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LiveServer() {
    server_.stop();
    thread_.join();
  }
  json post(const std::string& path, const json& body, int* status = nullptr) {
    httplib::Client client("127.0.0.1", port_);
    auto res = client.Post(path, body.dump(), "application/json");
    expect(static_cast<bool>(res), "no response from " + path);
    if (status) *status = res->status;
    return json::parse(res->body);
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

std::string templates() {
  ServiceConfig config;
  config.log_requests = false;
  const Service lexicon_service(config, Lexicon::default_lexicon(), FeedbackConfig{}, nullptr);
  int status = 0;
  json doc;
  {
    LiveServer live(lexicon_service);
    doc = live.post("/v1/feedback", {{"text", testing::kMixedPraiseText}}, &status);
  }
  expect(status == 200, "status " + std::to_string(status));
  expect(doc["items"].size() == 2, "expected two items");
  expect(doc["items"][0]["text"] ==
             "Saying \"Good job\" is praising students for the outcome. You should focus on "
             "praising the students for their effort and process towards learning. Do you want to "
             "try responding again?",
         "outcome sentence: " + doc["items"][0]["text"].dump());
  expect(doc["items"][1]["text"] ==
             "Saying \"stuck with it\" is a nice example of process-focused praise, which praises "
             "students for their effort.",
         "effort sentence: " + doc["items"][1]["text"].dump());

  config.tagger = TaggerMode::kExternal;
  config.adapter_endpoint = "in-process";
  auto pool = std::make_shared<AdapterPool>(
      [] {
        return make_function_transport([](const std::string& request) {
          const auto req = json::parse(request);
          return json{{"id", req["id"]},
                      {"spans", {{{"label", "Effort"}, {"token_start", 3}, {"token_end", 6}, {"confidence", 0.4}}}}}
              .dump();
        });
      },
      1, std::chrono::milliseconds(1000));
  FeedbackConfig feedback;
  feedback.confidence_threshold = 0.5;
  const Service external_service(config, Lexicon::default_lexicon(), feedback, pool);
  {
    LiveServer live(external_service);
    doc = live.post("/v1/feedback", {{"text", "I can tell you are committed to this."}}, &status);
  }
  expect(status == 200, "hedged status " + std::to_string(status));
  expect(doc["items"].size() == 1 && doc["items"][0]["text"] ==
                                         "Saying \"you are committed\" might be an example of "
                                         "praising effort. Do you want to explain your reasoning?",
         "hedged sentence: " + doc["items"].dump());
  return "3 sentences byte-exact";
}

std::string split() {
  const Corpus corpus = load_jsonl(testing::data_path("praise_fixture.jsonl"));
  expect(corpus.responses.size() == 129, "fixture size");
  auto group_of = [](const AnnotatedResponse& r) {
    const auto l = derive_labels(r.gold_spans());
    if (l.effort && l.outcome) return 1;
    if (l.effort) return 0;
    if (l.outcome) return 2;
    return 3;
  };
  std::array<std::size_t, 4> totals{};
  for (const auto& r : corpus.responses) ++totals[group_of(r)];
  expect(totals == std::array<std::size_t, 4>{52, 29, 26, 22}, "group sizes");

  auto members = [](const Corpus& c) {
    std::vector<std::string> ids;
    for (const auto& r : c.responses) ids.push_back(r.id());
    return ids;
  };
  for (bool stratify : {false, true}) {
    for (std::uint64_t seed : {0ULL, 1ULL, 7ULL, 12345ULL, 0xdeadbeefULL}) {
      SplitConfig config;
      config.seed = seed;
      config.stratify = stratify;
      const auto a = split_dataset(corpus, config);
      const auto b = split_dataset(corpus, config);
      expect(a.train.responses.size() == 91 && a.validation.responses.size() == 13 &&
                 a.test.responses.size() == 25,
             "sizes for seed " + std::to_string(seed));
      expect(members(a.train) == members(b.train) && members(a.validation) == members(b.validation) &&
                 members(a.test) == members(b.test),
             "membership differs for seed " + std::to_string(seed));
      if (!stratify) continue;
      std::array<std::size_t, 4> train{};
      for (const auto& r : a.train.responses) ++train[group_of(r)];
      for (std::size_t g = 0; g < 4; ++g) {
        expect(std::abs(double(train[g]) - 0.7 * double(totals[g])) <= 1.0,
               "group " + std::to_string(g) + " train share for seed " + std::to_string(seed));
      }
    }
  }
  return "91/13/25, groups 52/29/26/22 within ±1 of 70% train over 5 seeds";
}

std::string round_trips() {
  const auto dir = std::filesystem::temp_directory_path() / "praisetag_acceptance";
  std::filesystem::create_directories(dir);
  std::size_t checked = 0;
  for (const char* name : {"praise_fixture.jsonl", "tag_distribution_fixture.jsonl",
                           "case_study_gold.jsonl"}) {
    const Corpus corpus = load_jsonl(testing::data_path(name));
    save_jsonl(corpus, dir / name);
    const Corpus again = load_jsonl(dir / name);
    expect(again.responses == corpus.responses, std::string("JSONL identity for ") + name);

    const auto conll = dir / (std::string(name) + ".conll");
    export_conll(corpus, conll);
    const Corpus back = import_conll(conll);
    expect(back.responses.size() == corpus.responses.size(), std::string("CoNLL size for ") + name);
    for (std::size_t i = 0; i < corpus.responses.size(); ++i) {
      expect(back.responses[i].id() == corpus.responses[i].id() &&
                 back.responses[i].gold_spans() == corpus.responses[i].gold_spans(),
             "CoNLL spans for " + corpus.responses[i].id());
    }
    checked += corpus.responses.size();
  }
  return std::to_string(checked) + " responses";
}

std::string aggregation() {
  const std::vector<double> values{0.8, 0.9};
  const auto agg = aggregate_runs(values, "f1");
  expect(std::abs(agg.mean - 0.85) < 1e-12, "mean " + std::to_string(agg.mean));
  expect(std::abs(agg.std - 0.070710678) < 1e-6, "std " + std::to_string(agg.std));
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "mean %.2f std %.9f", agg.mean, agg.std);
  return buffer;
}

std::string adapter_robustness() {
  const std::string text = "You did it, you did well, you got the right answer and you stuck with it.";
  const auto n_tokens = tokenize(text).size();
  auto check_doc = [&](const json& doc) {
    std::vector<EntitySpan> spans;
    for (const auto& s : doc["spans"]) {
      const double c = s["confidence"].get<double>();
      expect(c >= 0.0 && c <= 1.0, "confidence out of range");
      spans.push_back({*parse_label(s["label"].get<std::string>()), s["token_start"].get<std::size_t>(),
                       s["token_end"].get<std::size_t>(), c});
    }
    try {
      check_spans(spans, n_tokens);
    } catch (const std::exception& e) {
      throw Failure(std::string("invalid spans: ") + e.what());
    }
  };

  std::size_t requests = 0, external = 0, fallback = 0, errors = 0;
  for (TaggerMode mode : {TaggerMode::kExternalWithFallback, TaggerMode::kExternal}) {
    ServiceConfig config;
    config.log_requests = false;
    config.tagger = mode;
    config.adapter_endpoint = "fuzz";
    auto seed = std::make_shared<std::atomic<int>>(0);
    auto pool = std::make_shared<AdapterPool>(
        [seed] {
          return connect_endpoint(std::string("stdio:") + PRAISETAG_FAKE_ADAPTER + " fuzz " +
                                  std::to_string((*seed)++));
        },
        2, std::chrono::milliseconds(2000));
    const Service service(config, Lexicon::default_lexicon(), FeedbackConfig{}, pool);
    LiveServer live(service);
    for (int round = 0; round < 150; ++round) {
      for (const char* path : {"/v1/annotate", "/v1/feedback"}) {
        int status = 0;
        const json doc = live.post(path, {{"text", text}}, &status);
        ++requests;
        if (mode == TaggerMode::kExternalWithFallback) {
          expect(status == 200, std::string(path) + " returned " + std::to_string(status) + " in fallback mode");
        } else {
          expect(status == 200 || status == 502, std::string(path) + " returned " + std::to_string(status));
        }
        if (status != 200) {
          ++errors;
          continue;
        }
        (doc["tagger_id"] == "external" ? external : fallback)++;
        if (std::string(path) == "/v1/annotate") check_doc(doc);
      }
    }
  }
  expect(external > 0 && fallback > 0 && errors > 0, "fuzzer did not exercise every path");

  // Decoder fuzz without process overhead.
  std::mt19937_64 rng(104);
  std::uniform_int_distribution<std::int64_t> index(-3, static_cast<std::int64_t>(n_tokens) + 3);
  std::uniform_real_distribution<double> confidence(-1.0, 2.0);
  std::uniform_int_distribution<int> count(0, 8);
  const TokenSequence tokens = tokenize(text);
  for (int round = 0; round < 20000; ++round) {
    AdapterHandle handle(make_function_transport([&](const std::string& request) {
      json spans = json::array();
      for (int k = count(rng); k > 0; --k) {
        spans.push_back({{"label", testing::random_label(rng) == EntityLabel::kPerson ? "Person" : "Effort"},
                         {"token_start", index(rng)},
                         {"token_end", index(rng)},
                         {"confidence", confidence(rng)}});
      }
      return json{{"id", json::parse(request)["id"]}, {"spans", spans}}.dump();
    }));
    const auto prediction = external_tag(text, tokens, handle);
    try {
      check_spans(prediction.spans, tokens.size());
    } catch (const std::exception& e) {
      throw Failure(std::string("decoder produced invalid spans: ") + e.what());
    }
  }
  return std::to_string(requests) + " HTTP requests (" + std::to_string(external) + " external, " +
         std::to_string(fallback) + " fallback, " + std::to_string(errors) +
         " 502 without fallback) + 20000 decoded replies";
}

}  // namespace
}  // namespace praisetag

int main() {
  using praisetag::Criterion;
  const std::vector<Criterion> criteria{
      {"tag-distribution-arithmetic", 1000, praisetag::tag_distribution},
      {"case-study-categories", 1000, praisetag::case_study},
      {"token-metric-oracle", 30000, praisetag::metric_oracle},
      {"partial-tau1-equals-exact", 30000, praisetag::partial_equivalence},
      {"bio-properties", 30000, praisetag::bio_suite},
      {"template-byte-exactness", 10000, praisetag::templates},
      {"split-determinism-and-sizes", 10000, praisetag::split},
      {"format-round-trips", 10000, praisetag::round_trips},
      {"run-aggregation", 1000, praisetag::aggregation},
      {"adapter-robustness", 120000, praisetag::adapter_robustness},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto started = praisetag::Clock::now();
    std::string detail;
    bool ok = true;
    try {
      detail = c.check();
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    const double ms =
        std::chrono::duration<double, std::milli>(praisetag::Clock::now() - started).count();
    if (ok && ms > c.limit_ms) {
      ok = false;
      detail += " (over time limit)";
    }
    std::printf("%s  %-28s %8.1f ms (limit %.0f ms)  %s\n", ok ? "PASS" : "FAIL", c.name.c_str(), ms,
                c.limit_ms, detail.c_str());
    failed += ok ? 0 : 1;
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

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

#include "praisetag/service.h"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

#include "httplib.h"
#include "json.hpp"

#include "praisetag/bio.h"
#include "praisetag/dataset.h"
#include "praisetag/error.h"
#include "praisetag/report.h"
#include "praisetag/tokenizer.h"

namespace praisetag {
namespace {

using ojson = nlohmann::ordered_json;

HttpResult json_result(int status, const ojson& body) {
  return {status, body.dump(-1, ' ', false, ojson::error_handler_t::replace)};
}

HttpResult error_result(int status, std::string_view code, const std::string& message) {
  ojson body;
  body["error"] = {{"code", code}, {"message", message}};
  return json_result(status, body);
}

// Maps exceptions escaping a handler onto HTTP statuses.
template <typename Fn>
HttpResult guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const AdapterError& e) {
    const int status = e.kind() == AdapterErrorKind::kTimeout ? 504 : 502;
    return error_result(status, "adapter-" + std::string(adapter_error_kind_name(e.kind())), e.what());
  } catch (const Error& e) {
    const int status = e.code() == ErrorCode::kTemplateMissing || e.code() == ErrorCode::kIo ? 500 : 400;
    return error_result(status, error_code_name(e.code()), e.what());
  } catch (const std::exception& e) {
    return error_result(500, "internal", e.what());
  }
}

ojson parse_body(std::string_view body) {
  ojson doc;
  try {
    doc = ojson::parse(body);
  } catch (const ojson::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("request body is not JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::kParse, "request body must be a JSON object");
  return doc;
}

std::string request_text(const ojson& doc) {
  if (!doc.contains("text") || !doc["text"].is_string()) {
    throw Error(ErrorCode::kInvalidArgument, "\"text\" must be a string");
  }
  std::string text = doc["text"].get<std::string>();
  if (tokenize(text).empty()) throw Error(ErrorCode::kInvalidArgument, "\"text\" is empty");
  if (char_length(text) > kMaxTextChars) {
    throw Error(ErrorCode::kInvalidArgument,
                "\"text\" exceeds " + std::to_string(kMaxTextChars) + " characters");
  }
  return text;
}

bool valid_corpus_name(std::string_view name) {
  if (name.empty() || name.front() == '.') return false;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '_' || c == '-' || c == '.';
    if (!ok) return false;
  }
  return true;
}

std::optional<std::filesystem::path> resolve_path(const ojson& doc, const char* key,
                                                  const std::filesystem::path& base) {
  if (!doc.contains(key) || doc[key].is_null()) return std::nullopt;
  if (!doc[key].is_string()) throw Error(ErrorCode::kParse, std::string("config: ") + key + " must be a string");
  std::filesystem::path p = doc[key].get<std::string>();
  return p.is_absolute() ? p : base / p;
}

void parse_bind(const std::string& bind, ServiceConfig& config) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos) throw Error(ErrorCode::kInvalidArgument, "bind must be host:port");
  config.host = bind.substr(0, colon);
  try {
    config.port = std::stoi(bind.substr(colon + 1));
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInvalidArgument, "bad port in bind \"" + bind + "\"");
  }
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string_view tagger_mode_name(TaggerMode mode) {
  switch (mode) {
    case TaggerMode::kLexicon: return "lexicon";
    case TaggerMode::kExternal: return "external";
    case TaggerMode::kExternalWithFallback: return "external-with-lexicon-fallback";
  }
  return "lexicon";
}

std::optional<TaggerMode> parse_tagger_mode(std::string_view name) {
  for (TaggerMode mode : {TaggerMode::kLexicon, TaggerMode::kExternal, TaggerMode::kExternalWithFallback}) {
    if (tagger_mode_name(mode) == name) return mode;
  }
  return std::nullopt;
}

ServiceConfig ServiceConfig::from_json_text(std::string_view text,
                                            const std::filesystem::path& base_dir) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const ojson::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::kParse, "config: expected a JSON object");

  ServiceConfig config;
  try {
    if (doc.contains("bind")) parse_bind(doc["bind"].get<std::string>(), config);
    if (doc.contains("tagger")) {
      const auto mode = parse_tagger_mode(doc["tagger"].get<std::string>());
      if (!mode) throw Error(ErrorCode::kParse, "config: unknown tagger " + doc["tagger"].dump());
      config.tagger = *mode;
    }
    if (doc.contains("adapter")) config.adapter_endpoint = doc["adapter"].get<std::string>();
    if (doc.contains("adapter_pool_size")) config.adapter_pool_size = doc["adapter_pool_size"].get<std::size_t>();
    if (doc.contains("request_timeout_ms")) {
      config.request_timeout = std::chrono::milliseconds(doc["request_timeout_ms"].get<std::int64_t>());
    }
    if (doc.contains("confidence_threshold")) config.confidence_threshold = doc["confidence_threshold"].get<double>();
    if (doc.contains("allow_retry_prompt")) config.allow_retry_prompt = doc["allow_retry_prompt"].get<bool>();
    if (doc.contains("cors_origin")) config.cors_origin = doc["cors_origin"].get<std::string>();
    if (doc.contains("log_requests")) config.log_requests = doc["log_requests"].get<bool>();
  } catch (const ojson::exception& e) {
    throw Error(ErrorCode::kParse, std::string("config: ") + e.what());
  }
  config.lexicon_path = resolve_path(doc, "lexicon", base_dir);
  config.templates_path = resolve_path(doc, "templates", base_dir);
  config.corpus_dir = resolve_path(doc, "corpus_dir", base_dir);
  return config;
}

ServiceConfig ServiceConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str(), path.parent_path());
}

void ServiceConfig::apply_env() {
  if (const char* bind = std::getenv("PRAISETAG_BIND"); bind != nullptr && *bind != '\0') {
    parse_bind(bind, *this);
  }
  if (const char* adapter = std::getenv("PRAISETAG_ADAPTER"); adapter != nullptr && *adapter != '\0') {
    adapter_endpoint = adapter;
  }
}

void ServiceConfig::validate() const {
  if (request_timeout.count() <= 0) throw Error(ErrorCode::kInvalidArgument, "request timeout must be positive");
  if (port < 0 || port > 65535) throw Error(ErrorCode::kInvalidArgument, "port out of range");
  if (tagger != TaggerMode::kLexicon && adapter_endpoint.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "external tagger needs an adapter endpoint");
  }
  if (!(confidence_threshold >= 0.0 && confidence_threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "confidence threshold must be in [0, 1]");
  }
  for (const auto* path : {&lexicon_path, &templates_path}) {
    if (*path && !std::filesystem::is_regular_file(**path)) {
      throw Error(ErrorCode::kInvalidArgument, "missing file " + (*path)->string());
    }
  }
  if (corpus_dir && !std::filesystem::is_directory(*corpus_dir)) {
    throw Error(ErrorCode::kInvalidArgument, "missing corpus directory " + corpus_dir->string());
  }
}

namespace {

FeedbackConfig feedback_config_from(const ServiceConfig& config) {
  FeedbackConfig feedback;
  feedback.confidence_threshold = config.confidence_threshold;
  feedback.allow_retry_prompt = config.allow_retry_prompt;
  if (config.templates_path) feedback.templates = load_templates(*config.templates_path);
  feedback.validate();
  return feedback;
}

std::shared_ptr<AdapterPool> pool_from(const ServiceConfig& config) {
  if (config.tagger == TaggerMode::kLexicon) return nullptr;
  const std::string endpoint = config.adapter_endpoint;
  return std::make_shared<AdapterPool>([endpoint] { return connect_endpoint(endpoint); },
                                       config.adapter_pool_size, config.request_timeout);
}

}  // namespace

Service::Service(ServiceConfig config)
    : Service(config,
              config.lexicon_path ? Lexicon::load(*config.lexicon_path) : Lexicon::default_lexicon(),
              feedback_config_from(config), pool_from(config)) {}

Service::Service(ServiceConfig config, Lexicon lexicon, FeedbackConfig feedback,
                 std::shared_ptr<AdapterPool> pool)
    : config_(std::move(config)),
      lexicon_(std::move(lexicon)),
      feedback_(std::move(feedback)),
      pool_(std::move(pool)) {
  config_.validate();
  feedback_.validate();
}

struct Service::Tagged {
  TokenSequence tokens;
  Prediction prediction;
};

Service::Tagged Service::tag(std::string_view text, const std::string& response_id,
                             TaggerMode mode) const {
  Tagged out;
  out.tokens = tokenize(text);
  if (mode == TaggerMode::kLexicon) {
    out.prediction = lexicon_tag(out.tokens, lexicon_, response_id);
    return out;
  }
  try {
    if (!pool_) throw AdapterError(AdapterErrorKind::kTransport, "no adapter configured");
    auto lease = pool_->acquire();
    out.prediction = external_tag(text, out.tokens, *lease, response_id);
  } catch (const AdapterError&) {
    if (mode != TaggerMode::kExternalWithFallback) throw;
    out.prediction = lexicon_tag(out.tokens, lexicon_, response_id);
    out.prediction.tagger_id = std::string(kFallbackTaggerId);
  }
  return out;
}

HttpResult Service::annotate(std::string_view body) const {
  return guarded([&] {
    const std::string text = request_text(parse_body(body));
    const Tagged tagged = tag(text, "", config_.tagger);

    ojson tokens = ojson::array();
    for (const auto& t : tagged.tokens) {
      tokens.push_back({{"text", t.text}, {"char_start", t.char_start}, {"char_end", t.char_end}});
    }
    ojson spans = ojson::array();
    for (const auto& span : tagged.prediction.spans) {
      ojson s;
      s["label"] = label_name(span.label);
      s["token_start"] = span.token_start;
      s["token_end"] = span.token_end;
      s["confidence"] = span.confidence.value_or(1.0);
      s["quote"] = span_text(text, tagged.tokens, span);
      s["char_start"] = tagged.tokens[span.token_start].char_start;
      s["char_end"] = tagged.tokens[span.token_end - 1].char_end;
      spans.push_back(std::move(s));
    }
    const PraiseLabels labels = derive_labels(tagged.prediction.spans);
    ojson out;
    out["tokens"] = std::move(tokens);
    out["spans"] = std::move(spans);
    out["labels"] = to_json(labels);
    out["verdict"] = to_json(classify_correctness(labels));
    out["tagger_id"] = tagged.prediction.tagger_id;
    out["latency_ms"] = tagged.prediction.latency_ms;
    return json_result(200, out);
  });
}

HttpResult Service::feedback(std::string_view body) const {
  return guarded([&] {
    const std::string text = request_text(parse_body(body));
    const Tagged tagged = tag(text, "", config_.tagger);
    const FeedbackMessage message = render_feedback(text, tagged.tokens, tagged.prediction, feedback_);
    ojson out = to_json(message);
    out["tagger_id"] = tagged.prediction.tagger_id;
    return json_result(200, out);
  });
}

HttpResult Service::evaluate(std::string_view body) const {
  return guarded([&]() -> HttpResult {
    const ojson doc = parse_body(body);
    if (!doc.contains("gold_corpus_ref") || !doc["gold_corpus_ref"].is_string()) {
      return error_result(400, "invalid-argument", "\"gold_corpus_ref\" must be a string");
    }
    const std::string name = doc["gold_corpus_ref"].get<std::string>();
    const auto path = config_.corpus_dir ? *config_.corpus_dir / (name + ".jsonl") : std::filesystem::path();
    if (!config_.corpus_dir || !valid_corpus_name(name) || !std::filesystem::is_regular_file(path)) {
      return error_result(404, "unknown-corpus", "no corpus named \"" + name + "\"");
    }
    const Corpus gold = load_jsonl(path);

    double tau = kDefaultTau;
    if (doc.contains("tau")) {
      if (!doc["tau"].is_number()) return error_result(400, "invalid-argument", "\"tau\" must be a number");
      tau = doc["tau"].get<double>();
    }

    std::vector<std::vector<Prediction>> sets;
    if (doc.contains("predictions")) {
      const ojson& preds = doc["predictions"];
      if (!preds.is_array()) return error_result(400, "parse-error", "\"predictions\" must be an array");
      auto read_set = [](const ojson& items) {
        std::ostringstream lines;
        for (const auto& item : items) lines << item.dump() << '\n';
        std::istringstream in(lines.str());
        return read_predictions(in);
      };
      const bool nested = !preds.empty() && preds.front().is_array();
      if (nested) {
        for (const auto& set : preds) {
          if (!set.is_array()) return error_result(400, "parse-error", "mixed prediction set shapes");
          sets.push_back(read_set(set));
        }
      } else {
        sets.push_back(read_set(preds));
      }
    } else if (doc.contains("tagger")) {
      if (!doc["tagger"].is_string()) return error_result(400, "invalid-argument", "\"tagger\" must be a string");
      const std::string which = doc["tagger"].get<std::string>();
      TaggerMode mode;
      if (which == "lexicon") {
        mode = TaggerMode::kLexicon;
      } else if (which == "external" || which == "configured") {
        mode = config_.tagger;
        if (which == "external" && mode == TaggerMode::kLexicon) {
          return error_result(400, "invalid-argument", "no external tagger configured");
        }
      } else {
        return error_result(400, "invalid-argument", "unknown tagger \"" + which + "\"");
      }
      std::vector<Prediction> set;
      for (const auto& response : gold.responses) {
        set.push_back(tag(response.text(), response.id(), mode).prediction);
      }
      sets.push_back(std::move(set));
    } else {
      return error_result(400, "invalid-argument", "supply \"predictions\" or \"tagger\"");
    }
    if (sets.empty()) return error_result(400, "invalid-argument", "no prediction sets");

    ojson out{{"corpus", name}};
    out.update(to_json(evaluate_runs(gold, sets, tau)));
    return json_result(200, out);
  });
}

HttpResult Service::corpus_stats(std::string_view name) const {
  return guarded([&]() -> HttpResult {
    const std::string n(name);
    const auto path = config_.corpus_dir ? *config_.corpus_dir / (n + ".jsonl") : std::filesystem::path();
    if (!config_.corpus_dir || !valid_corpus_name(n) || !std::filesystem::is_regular_file(path)) {
      return error_result(404, "unknown-corpus", "no corpus named \"" + n + "\"");
    }
    const Corpus corpus = load_jsonl(path);
    return json_result(200, to_json(compute_stats(corpus), n));
  });
}

HttpResult Service::health() const { return json_result(200, ojson{{"status", "ok"}}); }

void Service::mount(httplib::Server& server) const {
  auto send = [](httplib::Response& res, const HttpResult& result) {
    res.status = result.status;
    res.set_content(result.body, "application/json");
  };
  server.Post("/v1/annotate", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, annotate(req.body));
  });
  server.Post("/v1/feedback", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, feedback(req.body));
  });
  server.Post("/v1/evaluate", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, evaluate(req.body));
  });
  server.Get(R"(/v1/corpora/([^/]+)/stats)",
             [this, send](const httplib::Request& req, httplib::Response& res) {
               send(res, corpus_stats(req.matches[1].str()));
             });
  server.Get("/health", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, health());
  });

  if (!config_.cors_origin.empty()) {
    server.set_default_headers({{"Access-Control-Allow-Origin", config_.cors_origin},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  }

  if (!config_.log_requests) return;
  server.set_logger([](const httplib::Request& req, const httplib::Response& res) {
    static std::mutex log_mutex;
    ojson line;
    line["ts"] = utc_now();
    line["method"] = req.method;
    line["path"] = req.path;
    line["status"] = res.status;
    line["remote_addr"] = req.remote_addr;
    line["request_bytes"] = req.body.size();
    line["response_bytes"] = res.body.size();
    std::lock_guard lock(log_mutex);
    std::cerr << line.dump(-1, ' ', false, ojson::error_handler_t::replace) << '\n';
  });
}

bool Service::listen(httplib::Server& server) const {
  mount(server);
  return server.listen(config_.host, config_.port);
}

}  // namespace praisetag

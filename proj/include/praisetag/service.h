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

#ifndef PRAISETAG_SERVICE_H_
#define PRAISETAG_SERVICE_H_

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "praisetag/adapter.h"
#include "praisetag/feedback.h"
#include "praisetag/tagging.h"

namespace httplib {
class Server;
}

namespace praisetag {

enum class TaggerMode { kLexicon, kExternal, kExternalWithFallback };

std::string_view tagger_mode_name(TaggerMode mode);
std::optional<TaggerMode> parse_tagger_mode(std::string_view name);

inline constexpr std::size_t kMaxTextChars = 10000;

// Service settings. The config file is a JSON object; see README.md for the
// key list. Relative paths resolve against the config file's directory.
// PRAISETAG_BIND ("host:port") and PRAISETAG_ADAPTER override the file.
struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  TaggerMode tagger = TaggerMode::kLexicon;
  std::string adapter_endpoint;
  std::size_t adapter_pool_size = 4;
  std::chrono::milliseconds request_timeout = kDefaultAdapterTimeout;
  std::optional<std::filesystem::path> lexicon_path;
  std::optional<std::filesystem::path> templates_path;
  double confidence_threshold = 0.5;
  bool allow_retry_prompt = true;
  std::optional<std::filesystem::path> corpus_dir;
  std::string cors_origin;
  bool log_requests = true;  // one JSON line per request on stderr

  static ServiceConfig load(const std::filesystem::path& path);
  static ServiceConfig from_json_text(std::string_view text, const std::filesystem::path& base_dir);
  void apply_env();
  // Throws Error(kInvalidArgument) for missing paths, a non-positive
  // timeout, or an external tagger without an adapter endpoint.
  void validate() const;
};

struct HttpResult {
  int status = 200;
  std::string body;  // JSON
};

// Request handlers, usable without a socket. Handlers share only immutable
// configuration and the adapter pool, so they are safe to call
// concurrently.
class Service {
 public:
  // Loads lexicon and templates named in `config` and, for external
  // taggers, creates an adapter pool over `config.adapter_endpoint`.
  explicit Service(ServiceConfig config);
  // Explicit dependencies; `pool` may be null for lexicon mode.
  Service(ServiceConfig config, Lexicon lexicon, FeedbackConfig feedback,
          std::shared_ptr<AdapterPool> pool);

  HttpResult annotate(std::string_view body) const;
  HttpResult feedback(std::string_view body) const;
  HttpResult evaluate(std::string_view body) const;
  HttpResult corpus_stats(std::string_view name) const;
  HttpResult health() const;

  // Routes, CORS headers and one-JSON-line-per-request logging to stderr.
  void mount(httplib::Server& server) const;

  // Binds config host:port and blocks. Returns false when binding fails.
  bool listen(httplib::Server& server) const;

  const ServiceConfig& config() const { return config_; }

 private:
  struct Tagged;
  Tagged tag(std::string_view text, const std::string& response_id, TaggerMode mode) const;

  ServiceConfig config_;
  Lexicon lexicon_;
  FeedbackConfig feedback_;
  std::shared_ptr<AdapterPool> pool_;
};

}  // namespace praisetag

#endif  // PRAISETAG_SERVICE_H_

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

#ifndef PRAISETAG_ADAPTER_H_
#define PRAISETAG_ADAPTER_H_

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "praisetag/annotation.h"
#include "praisetag/tagging.h"

// External model adapters speak newline-delimited JSON:
//
//   request  {"id": "...", "text": "...", "tokens": ["...", ...]}
//   reply    {"id": "...", "spans": [{"token_start": 0, "token_end": 2,
//             "label": "Outcome", "confidence": 0.9}]}
//
// One reply per request, matched by id. Unknown fields are ignored.

namespace praisetag {

enum class AdapterErrorKind { kTransport, kProtocol, kTimeout };

std::string_view adapter_error_kind_name(AdapterErrorKind kind);

class AdapterError : public std::runtime_error {
 public:
  AdapterError(AdapterErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  AdapterErrorKind kind() const { return kind_; }

 private:
  AdapterErrorKind kind_;
};

// Carries one request line and returns one reply line (both without the
// trailing newline). Throws AdapterError.
class Transport {
 public:
  virtual ~Transport() = default;

  virtual std::string round_trip(const std::string& request_line,
                                 std::chrono::milliseconds timeout) = 0;
  virtual std::string describe() const = 0;
};

// Spawns `argv` and talks over its stdin/stdout. The child is terminated
// when the transport is destroyed.
std::unique_ptr<Transport> make_stdio_transport(std::vector<std::string> argv);
// Persistent TCP connection, one JSON object per line in each direction.
std::unique_ptr<Transport> make_tcp_transport(std::string host, std::uint16_t port);
// One HTTP POST per request; the reply is the response body.
std::unique_ptr<Transport> make_http_transport(std::string base_url, std::string path);
// In-process transport, mostly for tests.
std::unique_ptr<Transport> make_function_transport(
    std::function<std::string(const std::string&)> handler, std::string name = "function");

// Endpoint strings:
//   stdio:<program> [args...]     whitespace separated
//   tcp://host:port
//   http://host:port/path
std::unique_ptr<Transport> connect_endpoint(const std::string& endpoint);

inline constexpr std::chrono::milliseconds kDefaultAdapterTimeout{10000};

// One connection to a model adapter. At most one request is in flight; a
// handle can move between threads but must not be shared mid-request.
// After a timeout or a protocol error the stream may be out of sync, so the
// handle reports itself broken and should be replaced.
class AdapterHandle {
 public:
  explicit AdapterHandle(std::unique_ptr<Transport> transport,
                         std::chrono::milliseconds timeout = kDefaultAdapterTimeout);

  std::string exchange(const std::string& request_line);

  bool broken() const { return broken_; }
  void mark_broken() { broken_ = true; }
  std::chrono::milliseconds timeout() const { return timeout_; }
  std::string describe() const { return transport_->describe(); }
  std::string next_request_id();

 private:
  std::unique_ptr<Transport> transport_;
  std::chrono::milliseconds timeout_;
  std::uint64_t counter_ = 0;
  bool broken_ = false;
};

// Builds the request line for `tokens`.
std::string encode_adapter_request(const std::string& id, std::string_view text,
                                   const TokenSequence& tokens);

// Parses a reply line and sanitizes its spans: ranges are clipped to the
// token count (emptied spans dropped), overlaps resolved, confidences
// clamped to [0, 1]. Throws AdapterError(kProtocol) on malformed input or
// an id mismatch.
std::vector<EntitySpan> decode_adapter_reply(const std::string& reply_line,
                                             const std::string& expected_id,
                                             std::size_t token_count);

// Tags one response through the adapter. `response_id` doubles as the
// request id when given.
Prediction external_tag(std::string_view response_text, AdapterHandle& adapter,
                        std::string response_id = {});
Prediction external_tag(std::string_view response_text, const TokenSequence& tokens,
                        AdapterHandle& adapter, std::string response_id = {});

// Fixed-size pool of lazily connected handles for concurrent callers.
class AdapterPool {
 public:
  using Factory = std::function<std::unique_ptr<Transport>()>;

  AdapterPool(Factory factory, std::size_t size, std::chrono::milliseconds timeout);

  class Lease {
   public:
    Lease(AdapterPool* pool, std::unique_ptr<AdapterHandle> handle)
        : pool_(pool), handle_(std::move(handle)) {}
    Lease(Lease&& other) noexcept
        : pool_(std::exchange(other.pool_, nullptr)), handle_(std::move(other.handle_)) {}
    Lease& operator=(Lease&&) = delete;
    ~Lease();

    AdapterHandle& operator*() { return *handle_; }
    AdapterHandle* operator->() { return handle_.get(); }

   private:
    AdapterPool* pool_;
    std::unique_ptr<AdapterHandle> handle_;
  };

  // Blocks until a slot is free. Connects a new handle when the slot has
  // none or its previous one broke; connection failures propagate.
  Lease acquire();

 private:
  void release(std::unique_ptr<AdapterHandle> handle);

  Factory factory_;
  std::chrono::milliseconds timeout_;
  std::mutex mutex_;
  std::condition_variable available_;
  std::vector<std::unique_ptr<AdapterHandle>> idle_;
  std::size_t free_slots_;
};

}  // namespace praisetag

#endif  // PRAISETAG_ADAPTER_H_

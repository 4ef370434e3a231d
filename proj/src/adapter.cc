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

#include "praisetag/adapter.h"

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "praisetag/tokenizer.h"

namespace praisetag {
namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

constexpr std::size_t kMaxReplyBytes = 1 << 20;

[[noreturn]] void fail(AdapterErrorKind kind, const std::string& message) {
  throw AdapterError(kind, message);
}

void ignore_sigpipe() {
  static const bool once = [] {
    ::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)once;
}

int remaining_ms(Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
  return static_cast<int>(std::max<std::int64_t>(0, left.count()));
}

// Line-oriented I/O over a pair of file descriptors with a deadline.
class FdChannel {
 public:
  FdChannel(int read_fd, int write_fd, bool socket)
      : read_fd_(read_fd), write_fd_(write_fd), socket_(socket) {}

  void write_all(std::string_view data, Clock::time_point deadline) {
    std::size_t sent = 0;
    while (sent < data.size()) {
      pollfd pfd{write_fd_, POLLOUT, 0};
      const int ready = ::poll(&pfd, 1, remaining_ms(deadline));
      if (ready == 0) fail(AdapterErrorKind::kTimeout, "timed out writing to adapter");
      if (ready < 0) {
        if (errno == EINTR) continue;
        fail(AdapterErrorKind::kTransport, std::string("poll: ") + std::strerror(errno));
      }
      const ssize_t n = socket_ ? ::send(write_fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL)
                                : ::write(write_fd_, data.data() + sent, data.size() - sent);
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        fail(AdapterErrorKind::kTransport, std::string("write to adapter: ") + std::strerror(errno));
      }
      sent += static_cast<std::size_t>(n);
    }
  }

  std::string read_line(Clock::time_point deadline) {
    for (;;) {
      const auto newline = buffer_.find('\n');
      if (newline != std::string::npos) {
        std::string line = buffer_.substr(0, newline);
        buffer_.erase(0, newline + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      if (buffer_.size() > kMaxReplyBytes) {
        fail(AdapterErrorKind::kProtocol, "adapter reply exceeds 1 MiB");
      }
      pollfd pfd{read_fd_, POLLIN, 0};
      const int ready = ::poll(&pfd, 1, remaining_ms(deadline));
      if (ready == 0) fail(AdapterErrorKind::kTimeout, "timed out waiting for adapter reply");
      if (ready < 0) {
        if (errno == EINTR) continue;
        fail(AdapterErrorKind::kTransport, std::string("poll: ") + std::strerror(errno));
      }
      char chunk[4096];
      const ssize_t n = ::read(read_fd_, chunk, sizeof(chunk));
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        fail(AdapterErrorKind::kTransport, std::string("read from adapter: ") + std::strerror(errno));
      }
      if (n == 0) fail(AdapterErrorKind::kTransport, "adapter closed the stream");
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  int read_fd_;
  int write_fd_;
  bool socket_;
  std::string buffer_;
};

class StdioTransport : public Transport {
 public:
  explicit StdioTransport(std::vector<std::string> argv) : argv_(std::move(argv)) {
    ignore_sigpipe();
    if (argv_.empty()) fail(AdapterErrorKind::kTransport, "empty adapter command");
    int to_child[2];
    int from_child[2];
    if (::pipe2(to_child, O_CLOEXEC) != 0) {
      fail(AdapterErrorKind::kTransport, std::string("pipe: ") + std::strerror(errno));
    }
    if (::pipe2(from_child, O_CLOEXEC) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      fail(AdapterErrorKind::kTransport, std::string("pipe: ") + std::strerror(errno));
    }
    std::vector<char*> args;
    for (auto& a : argv_) args.push_back(a.data());
    args.push_back(nullptr);

    pid_ = ::fork();
    if (pid_ < 0) {
      for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
      fail(AdapterErrorKind::kTransport, std::string("fork: ") + std::strerror(errno));
    }
    if (pid_ == 0) {
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::execvp(args[0], args.data());
      ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    write_fd_ = to_child[1];
    read_fd_ = from_child[0];
    channel_ = std::make_unique<FdChannel>(read_fd_, write_fd_, false);
  }

  ~StdioTransport() override {
    ::close(write_fd_);
    ::close(read_fd_);
    if (pid_ > 0) {
      ::kill(pid_, SIGTERM);
      for (int i = 0; i < 50; ++i) {
        if (::waitpid(pid_, nullptr, WNOHANG) != 0) return;
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
      }
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, nullptr, 0);
    }
  }

  std::string round_trip(const std::string& request_line,
                         std::chrono::milliseconds timeout) override {
    const auto deadline = Clock::now() + timeout;
    channel_->write_all(request_line + "\n", deadline);
    return channel_->read_line(deadline);
  }

  std::string describe() const override { return "stdio:" + argv_.front(); }

 private:
  std::vector<std::string> argv_;
  pid_t pid_ = -1;
  int read_fd_ = -1;
  int write_fd_ = -1;
  std::unique_ptr<FdChannel> channel_;
};

class TcpTransport : public Transport {
 public:
  TcpTransport(std::string host, std::uint16_t port) : host_(std::move(host)), port_(port) {
    ignore_sigpipe();
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* found = nullptr;
    const std::string service = std::to_string(port_);
    if (::getaddrinfo(host_.c_str(), service.c_str(), &hints, &found) != 0 || found == nullptr) {
      fail(AdapterErrorKind::kTransport, "cannot resolve " + host_);
    }
    for (addrinfo* ai = found; ai != nullptr; ai = ai->ai_next) {
      const int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
      if (fd < 0) continue;
      if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
        fd_ = fd;
        break;
      }
      ::close(fd);
    }
    ::freeaddrinfo(found);
    if (fd_ < 0) fail(AdapterErrorKind::kTransport, "cannot connect to " + describe());
    channel_ = std::make_unique<FdChannel>(fd_, fd_, true);
  }

  ~TcpTransport() override {
    if (fd_ >= 0) ::close(fd_);
  }

  std::string round_trip(const std::string& request_line,
                         std::chrono::milliseconds timeout) override {
    const auto deadline = Clock::now() + timeout;
    channel_->write_all(request_line + "\n", deadline);
    return channel_->read_line(deadline);
  }

  std::string describe() const override {
    return "tcp://" + host_ + ":" + std::to_string(port_);
  }

 private:
  std::string host_;
  std::uint16_t port_;
  int fd_ = -1;
  std::unique_ptr<FdChannel> channel_;
};

class HttpTransport : public Transport {
 public:
  HttpTransport(std::string base_url, std::string path)
      : base_url_(std::move(base_url)), path_(std::move(path)) {}

  std::string round_trip(const std::string& request_line,
                         std::chrono::milliseconds timeout) override {
    httplib::Client client(base_url_);
    if (!client.is_valid()) fail(AdapterErrorKind::kTransport, "invalid adapter url " + base_url_);
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(timeout - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());

    const auto started = Clock::now();
    auto result = client.Post(path_, request_line, "application/json");
    if (!result) {
      const auto elapsed = Clock::now() - started;
      if (result.error() == httplib::Error::ConnectionTimeout || elapsed >= timeout) {
        fail(AdapterErrorKind::kTimeout, "adapter request timed out");
      }
      fail(AdapterErrorKind::kTransport,
           "adapter request failed: " + httplib::to_string(result.error()));
    }
    if (result->status != 200) {
      fail(AdapterErrorKind::kTransport, "adapter answered HTTP " + std::to_string(result->status));
    }
    std::string body = result->body;
    while (!body.empty() && (body.back() == '\n' || body.back() == '\r')) body.pop_back();
    return body;
  }

  std::string describe() const override { return base_url_ + path_; }

 private:
  std::string base_url_;
  std::string path_;
};

class FunctionTransport : public Transport {
 public:
  FunctionTransport(std::function<std::string(const std::string&)> handler, std::string name)
      : handler_(std::move(handler)), name_(std::move(name)) {}

  std::string round_trip(const std::string& request_line, std::chrono::milliseconds) override {
    return handler_(request_line);
  }

  std::string describe() const override { return name_; }

 private:
  std::function<std::string(const std::string&)> handler_;
  std::string name_;
};

}  // namespace

std::string_view adapter_error_kind_name(AdapterErrorKind kind) {
  switch (kind) {
    case AdapterErrorKind::kTransport: return "transport";
    case AdapterErrorKind::kProtocol: return "protocol";
    case AdapterErrorKind::kTimeout: return "timeout";
  }
  return "transport";
}

std::unique_ptr<Transport> make_stdio_transport(std::vector<std::string> argv) {
  return std::make_unique<StdioTransport>(std::move(argv));
}

std::unique_ptr<Transport> make_tcp_transport(std::string host, std::uint16_t port) {
  return std::make_unique<TcpTransport>(std::move(host), port);
}

std::unique_ptr<Transport> make_http_transport(std::string base_url, std::string path) {
  return std::make_unique<HttpTransport>(std::move(base_url), std::move(path));
}

std::unique_ptr<Transport> make_function_transport(
    std::function<std::string(const std::string&)> handler, std::string name) {
  return std::make_unique<FunctionTransport>(std::move(handler), std::move(name));
}

std::unique_ptr<Transport> connect_endpoint(const std::string& endpoint) {
  constexpr std::string_view kStdio = "stdio:";
  constexpr std::string_view kTcp = "tcp://";
  constexpr std::string_view kHttp = "http://";
  if (endpoint.starts_with(kStdio)) {
    std::istringstream words(endpoint.substr(kStdio.size()));
    std::vector<std::string> argv;
    for (std::string word; words >> word;) argv.push_back(word);
    return make_stdio_transport(std::move(argv));
  }
  if (endpoint.starts_with(kTcp)) {
    const std::string rest = endpoint.substr(kTcp.size());
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos) fail(AdapterErrorKind::kTransport, "tcp endpoint needs a port");
    int port = 0;
    try {
      port = std::stoi(rest.substr(colon + 1));
    } catch (const std::exception&) {
      fail(AdapterErrorKind::kTransport, "bad port in " + endpoint);
    }
    if (port <= 0 || port > 65535) fail(AdapterErrorKind::kTransport, "bad port in " + endpoint);
    return make_tcp_transport(rest.substr(0, colon), static_cast<std::uint16_t>(port));
  }
  if (endpoint.starts_with(kHttp)) {
    const auto slash = endpoint.find('/', kHttp.size());
    if (slash == std::string::npos) return make_http_transport(endpoint, "/");
    return make_http_transport(endpoint.substr(0, slash), endpoint.substr(slash));
  }
  fail(AdapterErrorKind::kTransport, "unsupported adapter endpoint \"" + endpoint + "\"");
}

AdapterHandle::AdapterHandle(std::unique_ptr<Transport> transport,
                             std::chrono::milliseconds timeout)
    : transport_(std::move(transport)), timeout_(timeout) {}

std::string AdapterHandle::exchange(const std::string& request_line) {
  if (broken_) fail(AdapterErrorKind::kTransport, "adapter connection is broken");
  try {
    return transport_->round_trip(request_line, timeout_);
  } catch (const AdapterError&) {
    broken_ = true;
    throw;
  } catch (const std::exception& e) {
    broken_ = true;
    fail(AdapterErrorKind::kTransport, e.what());
  }
}

std::string AdapterHandle::next_request_id() { return "req-" + std::to_string(++counter_); }

std::string encode_adapter_request(const std::string& id, std::string_view text,
                                   const TokenSequence& tokens) {
  json request = json::object();
  request["id"] = id;
  request["text"] = text;
  json words = json::array();
  for (const auto& token : tokens) words.push_back(token.text);
  request["tokens"] = std::move(words);
  return request.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::vector<EntitySpan> decode_adapter_reply(const std::string& reply_line,
                                             const std::string& expected_id,
                                             std::size_t token_count) {
  json reply;
  try {
    reply = json::parse(reply_line);
  } catch (const json::parse_error& e) {
    fail(AdapterErrorKind::kProtocol, std::string("reply is not JSON: ") + e.what());
  }
  if (!reply.is_object()) fail(AdapterErrorKind::kProtocol, "reply is not an object");
  const auto id = reply.find("id");
  if (id == reply.end() || !id->is_string()) fail(AdapterErrorKind::kProtocol, "reply has no id");
  if (id->get<std::string>() != expected_id) {
    fail(AdapterErrorKind::kProtocol,
         "reply id \"" + id->get<std::string>() + "\" does not match \"" + expected_id + "\"");
  }
  const auto spans = reply.find("spans");
  if (spans == reply.end() || !spans->is_array()) {
    fail(AdapterErrorKind::kProtocol, "reply has no spans array");
  }

  auto clip = [token_count](const json& value) -> std::size_t {
    if (value.is_number_unsigned()) {
      return static_cast<std::size_t>(std::min<std::uint64_t>(value.get<std::uint64_t>(), token_count));
    }
    const std::int64_t v = value.get<std::int64_t>();
    if (v <= 0) return 0;
    return static_cast<std::size_t>(std::min<std::int64_t>(v, static_cast<std::int64_t>(token_count)));
  };

  std::vector<EntitySpan> out;
  for (const auto& item : *spans) {
    if (!item.is_object()) fail(AdapterErrorKind::kProtocol, "span is not an object");
    const auto start = item.find("token_start");
    const auto end = item.find("token_end");
    const auto label = item.find("label");
    const auto confidence = item.find("confidence");
    if (start == item.end() || end == item.end() || !start->is_number_integer() ||
        !end->is_number_integer()) {
      fail(AdapterErrorKind::kProtocol, "span needs integer token_start and token_end");
    }
    if (label == item.end() || !label->is_string()) {
      fail(AdapterErrorKind::kProtocol, "span needs a string label");
    }
    const auto parsed = parse_label(label->get<std::string>());
    if (!parsed) fail(AdapterErrorKind::kProtocol, "unknown label " + label->dump());
    if (confidence == item.end() || !confidence->is_number()) {
      fail(AdapterErrorKind::kProtocol, "span needs a numeric confidence");
    }
    double conf = confidence->get<double>();
    if (!std::isfinite(conf)) conf = 0.0;

    EntitySpan span;
    span.label = *parsed;
    span.token_start = clip(*start);
    span.token_end = clip(*end);
    span.confidence = std::clamp(conf, 0.0, 1.0);
    if (span.token_start < span.token_end) out.push_back(span);
  }
  return resolve_overlaps(std::move(out));
}

Prediction external_tag(std::string_view response_text, const TokenSequence& tokens,
                        AdapterHandle& adapter, std::string response_id) {
  const std::string request_id = response_id.empty() ? adapter.next_request_id() : response_id;
  const auto started = Clock::now();
  const std::string reply = adapter.exchange(encode_adapter_request(request_id, response_text, tokens));

  Prediction prediction;
  prediction.response_id = std::move(response_id);
  prediction.tagger_id = std::string(kExternalTaggerId);
  try {
    prediction.spans = decode_adapter_reply(reply, request_id, tokens.size());
  } catch (const AdapterError&) {
    adapter.mark_broken();
    throw;
  }
  prediction.latency_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started).count();
  return prediction;
}

Prediction external_tag(std::string_view response_text, AdapterHandle& adapter,
                        std::string response_id) {
  return external_tag(response_text, tokenize(response_text), adapter, std::move(response_id));
}

AdapterPool::AdapterPool(Factory factory, std::size_t size, std::chrono::milliseconds timeout)
    : factory_(std::move(factory)), timeout_(timeout), free_slots_(std::max<std::size_t>(size, 1)) {}

AdapterPool::Lease::~Lease() {
  if (pool_ != nullptr) pool_->release(std::move(handle_));
}

AdapterPool::Lease AdapterPool::acquire() {
  std::unique_ptr<AdapterHandle> handle;
  {
    std::unique_lock lock(mutex_);
    available_.wait(lock, [this] { return free_slots_ > 0; });
    --free_slots_;
    if (!idle_.empty()) {
      handle = std::move(idle_.back());
      idle_.pop_back();
    }
  }
  if (!handle) {
    try {
      handle = std::make_unique<AdapterHandle>(factory_(), timeout_);
    } catch (...) {
      release(nullptr);
      throw;
    }
  }
  return Lease(this, std::move(handle));
}

void AdapterPool::release(std::unique_ptr<AdapterHandle> handle) {
  {
    std::lock_guard lock(mutex_);
    ++free_slots_;
    if (handle && !handle->broken()) idle_.push_back(std::move(handle));
  }
  available_.notify_one();
}

}  // namespace praisetag

#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <string>

#include "panelist/gateway.hpp"

namespace panelist {

struct RetryPolicy {
  /// Additional attempts after the first one.
  int max_retries = 3;
  std::chrono::milliseconds initial_delay{1000};
  double backoff_factor = 2.0;
  /// Uniform jitter as a fraction of each delay.
  double jitter = 0.1;
};

struct HttpClientConfig {
  /// scheme://host[:port][/prefix]
  std::string base_url = "https://api.openai.com";
  std::string path = "/v1/chat/completions";
  std::string api_key;
  RetryPolicy retry;
  /// Ceiling on in-flight requests through this client.
  int max_concurrency = 4;
  std::chrono::seconds timeout{120};
};

/// Name of the environment variable holding the provider key.
inline constexpr const char* kApiKeyEnv = "PANELIST_API_KEY";

/// Throws ConfigError if the variable is unset or empty.
std::string api_key_from_env();

/// JSON chat-completions over HTTP(S).
///
/// Retries connection failures, 408, 429 and 5xx with exponential backoff.
/// Other 4xx replies and unreadable 2xx payloads raise ProtocolError carrying
/// the provider's message; an exhausted retry budget raises TransportError.
class HttpChatClient final : public ChatClient {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  /// Throws ConfigError for a missing key or malformed base URL, before any
  /// network traffic.
  explicit HttpChatClient(HttpClientConfig config, Sleeper sleeper = {});
  ~HttpChatClient() override;

  std::uint64_t retry_count() const noexcept;

  /// Request body sent for `request`.
  static std::string request_body(const ChatRequest& request);
  /// Extracts the assistant text; throws ProtocolError on malformed payloads.
  static std::string parse_response(std::string_view body);

 private:
  std::string do_chat(const ChatRequest& request) override;

  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace panelist

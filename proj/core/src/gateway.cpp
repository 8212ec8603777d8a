#include "panelist/gateway.hpp"

#include <chrono>
#include <ctime>
#include <iostream>
#include <mutex>

#include <nlohmann/json.hpp>

#include "panelist/digest.hpp"
#include "panelist/error.hpp"

namespace panelist {

namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

LogSink& sink() {
  static LogSink s = [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };
  return s;
}

}  // namespace

std::string_view to_string(Role r) {
  switch (r) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "";
}

std::optional<Role> parse_role(std::string_view s) {
  if (s == "system") return Role::System;
  if (s == "user") return Role::User;
  if (s == "assistant") return Role::Assistant;
  return std::nullopt;
}

void validate(const GenerationParams& params) {
  if (params.model_id.empty()) throw ConfigError("model_id must not be empty");
  if (!(params.temperature >= 0.0)) throw ConfigError("temperature must be >= 0");
  if (params.max_tokens < 1) throw ConfigError("max_tokens must be positive");
}

std::string canonical_request(const ChatRequest& request) {
  nlohmann::ordered_json j;
  j["model"] = request.params.model_id;
  auto msgs = nlohmann::ordered_json::array();
  for (const auto& m : request.messages) {
    msgs.push_back({to_string(m.role), m.content});
  }
  j["messages"] = std::move(msgs);
  j["temperature"] = request.params.temperature;
  j["max_tokens"] = request.params.max_tokens;
  j["seed"] = request.params.seed ? nlohmann::ordered_json(*request.params.seed)
                                  : nlohmann::ordered_json(nullptr);
  j["sample_index"] = request.sample_index;
  return j.dump();
}

CacheKey CacheKey::of(const ChatRequest& request) {
  return {sha256_hex(canonical_request(request))};
}

std::string prompt_digest(std::string_view user_message) { return sha256_hex(user_message); }

std::string ChatClient::chat(const ChatRequest& request) {
  const auto& msgs = request.messages;
  if (msgs.empty()) throw ProtocolOrderError("chat request has no messages");
  if (msgs.back().role != Role::User) {
    throw ProtocolOrderError("chat request must end with a user message");
  }
  for (const auto& m : msgs) {
    if (m.role != Role::System && m.content.empty()) {
      throw ProtocolOrderError("chat request carries an empty " + std::string(to_string(m.role)) +
                               " message");
    }
  }
  calls_.fetch_add(1);
  return do_chat(request);
}

void set_warning_sink(LogSink s) {
  std::lock_guard lock(sink_mutex());
  sink() = std::move(s);
}

void warn(std::string_view message) {
  std::lock_guard lock(sink_mutex());
  if (sink()) sink()(message);
}

CachedChatClient::CachedChatClient(std::shared_ptr<ChatClient> client,
                                   std::optional<ResponseCache> cache,
                                   std::function<std::string()> clock)
    : client_(std::move(client)), cache_(std::move(cache)), clock_(std::move(clock)) {
  if (!client_) throw ConfigError("CachedChatClient needs a client");
  if (!clock_) clock_ = utc_now;
}

Completion CachedChatClient::cached_chat(const ChatRequest& request) {
  if (!cache_) {
    return {client_->chat(request), false};
  }
  const auto key = CacheKey::of(request);
  if (auto hit = cache_->lookup(key)) {
    return {std::move(*hit), true};
  }
  auto text = client_->chat(request);
  cache_->store(key, request, text, clock_());
  return {std::move(text), false};
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace panelist

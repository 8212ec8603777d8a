#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "panelist/chat.hpp"

namespace panelist {

struct GenerationParams {
  std::string model_id;
  double temperature = 0.7;
  int max_tokens = 32;
  std::optional<std::int64_t> seed;
};

/// Throws ConfigError when temperature < 0, max_tokens < 1, or model_id is empty.
void validate(const GenerationParams& params);

struct ChatRequest {
  Conversation messages;
  GenerationParams params;
  /// Distinguishes repeated samples of the same request.
  std::uint64_t sample_index = 0;
};

/// Content address of a request: SHA-256 over the model, every message,
/// the sampling parameters and the sample index.
struct CacheKey {
  std::string hex;

  static CacheKey of(const ChatRequest& request);
  friend bool operator==(const CacheKey&, const CacheKey&) = default;
};

/// Canonical JSON used for hashing a request.
std::string canonical_request(const ChatRequest& request);

/// Digest of one prompt text, as used by scripted mocks and trial records.
std::string prompt_digest(std::string_view user_message);

/// A chat-completion backend. Implementations must be safe to call from
/// several threads at once.
class ChatClient {
 public:
  virtual ~ChatClient() = default;

  /// Returns the assistant text. Throws ProtocolOrderError when `messages`
  /// is empty, does not end with a user turn, or carries an empty user or
  /// assistant message.
  std::string chat(const ChatRequest& request);

  std::uint64_t call_count() const noexcept { return calls_.load(); }

 private:
  virtual std::string do_chat(const ChatRequest& request) = 0;

  std::atomic<std::uint64_t> calls_{0};
};

using LogSink = std::function<void(std::string_view)>;

/// Where library warnings go. Defaults to stderr.
void set_warning_sink(LogSink sink);
void warn(std::string_view message);

/// One file per entry, named `<digest>.json`. Entries are published by an
/// atomic rename, so a concurrent reader sees either nothing or a whole entry.
class ResponseCache {
 public:
  /// Creates the directory if needed; throws ConfigError if it is not writable.
  explicit ResponseCache(std::filesystem::path dir);

  const std::filesystem::path& dir() const noexcept { return dir_; }

  /// A corrupt or mismatching entry is deleted with a warning and reported
  /// as a miss.
  std::optional<std::string> lookup(const CacheKey& key) const;
  void store(const CacheKey& key, const ChatRequest& request, std::string_view completion,
             std::string_view timestamp) const;
  std::filesystem::path entry_path(const CacheKey& key) const;

 private:
  std::filesystem::path dir_;
};

struct Completion {
  std::string text;
  bool served_from_cache = false;
};

/// A ChatClient with an optional persistent cache in front of it.
class CachedChatClient {
 public:
  explicit CachedChatClient(std::shared_ptr<ChatClient> client,
                            std::optional<ResponseCache> cache = std::nullopt,
                            std::function<std::string()> clock = {});

  Completion cached_chat(const ChatRequest& request);
  Completion cached_chat(const Conversation& messages, const GenerationParams& params,
                         std::uint64_t sample_index) {
    return cached_chat(ChatRequest{messages, params, sample_index});
  }

  ChatClient& client() noexcept { return *client_; }
  bool has_cache() const noexcept { return cache_.has_value(); }

 private:
  std::shared_ptr<ChatClient> client_;
  std::optional<ResponseCache> cache_;
  std::function<std::string()> clock_;
};

/// ISO-8601 UTC wall clock.
std::string utc_now();

}  // namespace panelist

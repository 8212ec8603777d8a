#include "panelist/http_client.hpp"

#include <cstdlib>
#include <random>
#include <semaphore>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "panelist/error.hpp"

namespace panelist {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // optional path prefix, no trailing slash
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("base URL '" + url + "' lacks a scheme");
  }
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw ConfigError("base URL '" + url + "' must use http or https");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  out.origin = url.substr(0, path_start);
  if (out.origin.size() <= scheme_end + 3) {
    throw ConfigError("base URL '" + url + "' lacks a host");
  }
  if (path_start != std::string::npos) {
    out.prefix = url.substr(path_start);
    while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
  }
  return out;
}

bool is_transient(int status) {
  return status == 408 || status == 429 || (status >= 500 && status <= 599);
}

std::string provider_message(const std::string& body) {
  try {
    const auto j = nlohmann::json::parse(body);
    if (j.contains("error")) {
      const auto& e = j["error"];
      if (e.is_object() && e.contains("message") && e["message"].is_string()) {
        return e["message"].get<std::string>();
      }
      if (e.is_string()) return e.get<std::string>();
    }
  } catch (const nlohmann::json::exception&) {
  }
  return body.substr(0, 500);
}

}  // namespace

std::string api_key_from_env() {
  const char* v = std::getenv(kApiKeyEnv);
  if (v == nullptr || *v == '\0') {
    throw ConfigError(std::string("environment variable ") + kApiKeyEnv + " is not set");
  }
  return v;
}

struct HttpChatClient::Impl {
  HttpClientConfig config;
  SplitUrl url;
  Sleeper sleeper;
  std::counting_semaphore<1024> slots;
  std::atomic<std::uint64_t> retries{0};
  std::mutex rng_mutex;
  std::minstd_rand rng{std::random_device{}()};

  Impl(HttpClientConfig c, Sleeper s)
      : config(std::move(c)), url(split_url(config.base_url)), sleeper(std::move(s)),
        slots(std::clamp(config.max_concurrency, 1, 1024)) {}

  std::chrono::milliseconds delay_for(int retry) {
    double ms = static_cast<double>(config.retry.initial_delay.count());
    for (int i = 0; i < retry; ++i) ms *= config.retry.backoff_factor;
    if (config.retry.jitter > 0.0) {
      std::lock_guard lock(rng_mutex);
      std::uniform_real_distribution<double> d(-config.retry.jitter, config.retry.jitter);
      ms *= 1.0 + d(rng);
    }
    return std::chrono::milliseconds(static_cast<std::int64_t>(std::max(0.0, ms)));
  }
};

HttpChatClient::HttpChatClient(HttpClientConfig config, Sleeper sleeper) {
  if (config.api_key.empty()) {
    throw ConfigError(std::string("missing API key (set ") + kApiKeyEnv + ")");
  }
  if (config.max_concurrency < 1) throw ConfigError("max_concurrency must be positive");
  if (config.retry.max_retries < 0) throw ConfigError("max_retries must be >= 0");
  if (!sleeper) {
    sleeper = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
  impl_ = std::make_unique<Impl>(std::move(config), std::move(sleeper));
}

HttpChatClient::~HttpChatClient() = default;

std::uint64_t HttpChatClient::retry_count() const noexcept { return impl_->retries.load(); }

std::string HttpChatClient::request_body(const ChatRequest& request) {
  nlohmann::ordered_json j;
  j["model"] = request.params.model_id;
  auto msgs = nlohmann::ordered_json::array();
  for (const auto& m : request.messages) {
    msgs.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  }
  j["messages"] = std::move(msgs);
  j["temperature"] = request.params.temperature;
  j["max_tokens"] = request.params.max_tokens;
  if (request.params.seed) {
    j["seed"] = *request.params.seed + static_cast<std::int64_t>(request.sample_index);
  }
  return j.dump();
}

std::string HttpChatClient::parse_response(std::string_view body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ProtocolError(std::string("provider returned invalid JSON: ") + e.what());
  }
  try {
    const auto& content = j.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw ProtocolError("provider message content is not a string");
    return content.get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw ProtocolError("provider payload lacks choices[0].message.content");
  }
}

std::string HttpChatClient::do_chat(const ChatRequest& request) {
  auto& impl = *impl_;
  const auto body = request_body(request);
  const auto path = impl.url.prefix + impl.config.path;
  const httplib::Headers headers = {{"Authorization", "Bearer " + impl.config.api_key}};

  std::string last_error;
  for (int attempt = 0; attempt <= impl.config.retry.max_retries; ++attempt) {
    if (attempt > 0) {
      impl.retries.fetch_add(1);
      impl.sleeper(impl.delay_for(attempt - 1));
    }
    httplib::Result res;
    {
      impl.slots.acquire();
      struct Release {
        std::counting_semaphore<1024>& s;
        ~Release() { s.release(); }
      } release{impl.slots};
      httplib::Client cli(impl.url.origin);
      cli.set_connection_timeout(impl.config.timeout);
      cli.set_read_timeout(impl.config.timeout);
      cli.set_write_timeout(impl.config.timeout);
      res = cli.Post(path, headers, body, "application/json");
    }
    if (!res) {
      last_error = "connection failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 200 && res->status < 300) {
      return parse_response(res->body);
    }
    last_error = "HTTP " + std::to_string(res->status) + ": " + provider_message(res->body);
    if (!is_transient(res->status)) {
      throw ProtocolError("provider rejected request: " + last_error);
    }
  }
  throw TransportError("giving up after " + std::to_string(impl.config.retry.max_retries + 1) +
                       " attempts: " + last_error);
}

}  // namespace panelist

#include <fstream>

#include <nlohmann/json.hpp>

#include "panelist/digest.hpp"
#include "panelist/error.hpp"
#include "panelist/gateway.hpp"

namespace panelist {

namespace fs = std::filesystem;

ResponseCache::ResponseCache(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec || !fs::is_directory(dir_)) {
    throw ConfigError("cache directory '" + dir_.string() + "' cannot be created");
  }
  const auto probe = dir_ / ".write-probe";
  {
    std::ofstream out(probe);
    if (!out) throw ConfigError("cache directory '" + dir_.string() + "' is not writable");
  }
  fs::remove(probe, ec);
}

fs::path ResponseCache::entry_path(const CacheKey& key) const { return dir_ / (key.hex + ".json"); }

std::optional<std::string> ResponseCache::lookup(const CacheKey& key) const {
  const auto path = entry_path(key);
  std::error_code ec;
  if (!fs::exists(path, ec)) return std::nullopt;
  try {
    const auto j = nlohmann::json::parse(read_file(path));
    if (j.at("key").get<std::string>() != key.hex) {
      throw std::runtime_error("key mismatch");
    }
    return j.at("completion").get<std::string>();
  } catch (const std::exception& e) {
    warn("cache entry " + path.filename().string() + " is corrupt (" + e.what() +
         "); discarding it");
    fs::remove(path, ec);
    return std::nullopt;
  }
}

void ResponseCache::store(const CacheKey& key, const ChatRequest& request,
                          std::string_view completion, std::string_view timestamp) const {
  nlohmann::ordered_json j;
  j["key"] = key.hex;
  j["completion"] = std::string(completion);
  j["model"] = request.params.model_id;
  j["temperature"] = request.params.temperature;
  j["max_tokens"] = request.params.max_tokens;
  j["seed"] = request.params.seed ? nlohmann::ordered_json(*request.params.seed)
                                  : nlohmann::ordered_json(nullptr);
  j["sample_index"] = request.sample_index;
  j["timestamp"] = std::string(timestamp);
  write_file_atomic(entry_path(key), j.dump(2) + "\n");
}

}  // namespace panelist

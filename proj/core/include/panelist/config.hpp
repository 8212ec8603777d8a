#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "panelist/analysis.hpp"
#include "panelist/codec.hpp"
#include "panelist/http_client.hpp"
#include "panelist/prompts.hpp"
#include "panelist/session.hpp"

namespace panelist {

struct ModelConfig {
  std::string id;
  std::string base_url = "https://api.openai.com";
  std::string path = "/v1/chat/completions";
  double temperature = 0.7;
  int max_tokens = 32;
  std::optional<std::int64_t> seed;
  int max_concurrency = 4;
  RetryPolicy retry;
};

struct StudyConfig {
  std::filesystem::path cases_path;
  std::filesystem::path reference_path;
  std::vector<ModelConfig> models;
  MemoryMode memory_mode = MemoryMode::WithMemory;
  AggregationMode aggregation = AggregationMode::Aggregated;
  /// Unset values fall back to the cases file, then to built-in defaults.
  std::optional<int> n_llm_users;
  std::optional<int> runs_per_user;
  std::optional<std::uint64_t> seed;
  /// Empty disables the response cache.
  std::filesystem::path cache_dir;
  std::filesystem::path output_dir = "out";
  AccuracyOracle accuracy_oracle = AccuracyOracle::TruthLabel;
  MseGranularity mse_granularity = MseGranularity::PerCondition;
  /// Sessions executed concurrently.
  int concurrency = 1;
  PromptConfig prompts;
};

/// Relative paths are resolved against `base_dir`. Throws ConfigError.
StudyConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir);
StudyConfig load_config(const std::filesystem::path& path);

/// Command-line values; each set field replaces the config file's value.
struct ConfigOverrides {
  std::optional<std::string> model;
  std::optional<MemoryMode> mode;
  std::optional<AggregationMode> aggregation;
  std::optional<int> users;
  std::optional<int> runs;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> cache_dir;
  std::optional<std::filesystem::path> output_dir;
  std::optional<int> concurrency;
};

/// `model` restricts the run to that model id; when the id is not
/// configured, a mock-only entry is created if `allow_new_model`, else
/// ConfigError is thrown.
void apply_overrides(StudyConfig& config, const ConfigOverrides& overrides, bool allow_new_model);

/// Canonical JSON of the effective configuration. File paths are reduced to
/// their file names so the snapshot never leaks local directory layout.
std::string config_snapshot(const StudyConfig& config);

/// Model id made safe for file names.
std::string file_safe(std::string_view id);

}  // namespace panelist

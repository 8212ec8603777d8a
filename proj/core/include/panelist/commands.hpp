#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "panelist/config.hpp"
#include "panelist/gateway.hpp"
#include "panelist/report.hpp"

namespace panelist {

struct RunOptions {
  /// Scripted-mock policy name; unset means the configured HTTP providers.
  std::optional<std::string> mock;
  /// Replaces every provider client (tests, custom backends).
  std::shared_ptr<ChatClient> client;
  /// Progress lines; nullptr for silence.
  std::ostream* progress = nullptr;
};

struct RunOutcome {
  std::vector<std::filesystem::path> logs;
  std::filesystem::path manifest;
  std::size_t records = 0;
  /// Records carried over from an interrupted earlier attempt.
  std::size_t resumed = 0;
};

/// Writes `trials-<model>.jsonl` per model and `manifest.json` into the output
/// directory. A partial log left by an interrupted run with the same
/// configuration is resumed. Credentials are checked for every model before
/// the first request.
RunOutcome cmd_run(const StudyConfig& config, const RunOptions& options = {});

struct AnalyzeOutcome {
  std::vector<ModelReport> reports;
  std::vector<std::filesystem::path> report_dirs;
  std::optional<std::filesystem::path> grid;
};

/// Analyzes each log (default: every `trials-*.jsonl` in the output
/// directory) into `<out>/reports/<setting>/`. Two or more logs also produce
/// `<out>/reports/concordance-grid.csv`.
AnalyzeOutcome cmd_analyze(const StudyConfig& config, std::span<const std::filesystem::path> logs = {});

struct CompareOutcome {
  std::vector<SettingSummary> settings;
  std::filesystem::path table;
  std::filesystem::path aggregation_table;
  /// "aggregation raised concordance in X of Y settings"
  std::string tally;
};

/// `inputs` are report directories, or directories searched recursively for
/// them. Throws ConfigError with fewer than two settings or when the settings
/// were scored against different human references.
CompareOutcome cmd_compare(std::span<const std::filesystem::path> inputs,
                           const std::filesystem::path& out_dir);

}  // namespace panelist

#pragma once

#include <filesystem>
#include <fstream>
#include <mutex>
#include <span>
#include <vector>

#include "panelist/session.hpp"

namespace panelist {

/// Append-only JSONL writer; safe for concurrent appends.
class TrialLogWriter {
 public:
  /// Opens `path` for appending, creating it if needed.
  explicit TrialLogWriter(const std::filesystem::path& path);

  void append(std::span<const TrialRecord> records);

 private:
  std::mutex mutex_;
  std::ofstream out_;
};

/// Throws SchemaError naming the file when it is missing, empty or has a
/// malformed line.
std::vector<TrialRecord> read_trial_log(const std::filesystem::path& path);

/// Like read_trial_log, but a missing file yields no records and a torn
/// final line (an interrupted append) is dropped.
std::vector<TrialRecord> read_partial_trial_log(const std::filesystem::path& path);

/// Rewrites `path` atomically with `records` sorted into protocol order.
void finalize_trial_log(const std::filesystem::path& path, std::vector<TrialRecord> records);

std::string serialize_trial_log(std::vector<TrialRecord> records);

}  // namespace panelist

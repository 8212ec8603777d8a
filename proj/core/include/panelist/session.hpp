#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "panelist/codec.hpp"
#include "panelist/gateway.hpp"
#include "panelist/prompts.hpp"
#include "panelist/study.hpp"

namespace panelist {

enum class MemoryMode {
  /// One continuous conversation per run.
  WithMemory,
  /// Fresh context per task-1 case and per (prediction, confidence) pair;
  /// each pair is prefixed by a few-shot context.
  Isolation,
};

std::string_view to_string(MemoryMode m);
/// Accepts "memory" and "isolation".
std::optional<MemoryMode> parse_memory_mode(std::string_view s);

struct LlmUser {
  std::string user_id;
  /// Position among all users.
  int index = 0;
  /// Position among the users sharing this condition.
  int index_in_condition = 0;
  Condition condition;
  std::vector<std::size_t> permutation_task1;
  std::vector<std::size_t> permutation_task2;
  std::vector<int> runs;
};

/// Seeded Fisher-Yates permutation of 0..n-1. Uses mt19937_64 with an
/// explicit bounded draw so the result is identical on every platform.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::mt19937_64& engine);

/// Users are dealt round-robin over the four conditions. Throws ConfigError
/// when `n_users` is not a positive multiple of 4.
std::vector<LlmUser> make_llm_users(const StudyDesign& design, int n_users, int runs_per_user,
                                    std::uint64_t seed);

struct TrialRecord {
  std::string model_id;
  MemoryMode mode = MemoryMode::WithMemory;
  std::string user_id;
  int run_id = 0;
  Condition condition;
  Task task = Task::Helpfulness;
  /// 0..47 in protocol order.
  int position = 0;
  /// For confidence records, the case of the preceding prediction.
  std::string case_id;
  std::string raw_response;
  ParseStatus parse_status = ParseStatus::Unparseable;
  /// Likert code for helpfulness/confidence.
  std::optional<int> code;
  std::optional<BinaryLabel> label;
  /// Accuracy code for predictions.
  std::optional<int> correct;
  int attempts = 1;
  std::string prompt_digest;
  bool served_from_cache = false;
  std::string timestamp;

  bool missing() const noexcept { return parse_status != ParseStatus::Ok; }

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

/// One JSON object, no trailing newline.
std::string to_json_line(const TrialRecord& r);
/// Throws SchemaError on malformed lines.
TrialRecord parse_trial_line(std::string_view line);

/// Sort key used for finalized logs.
bool protocol_order(const TrialRecord& a, const TrialRecord& b);

struct SessionOptions {
  MemoryMode mode = MemoryMode::WithMemory;
  GenerationParams params;
  AccuracyOracle oracle = AccuracyOracle::TruthLabel;
  /// Timestamp source for trial records; defaults to utc_now.
  std::function<std::string()> clock;
};

struct SessionResult {
  std::vector<TrialRecord> records;
  /// Every context sent to the model, in final form.
  std::vector<Conversation> contexts;
};

inline constexpr std::size_t kRecordsPerRun = 3 * kCasesPerTask;

/// Throws ProtocolOrderError unless the latest exchange in `context` is a
/// prediction (possibly re-asked), i.e. a confidence question may follow.
void require_prediction_before_confidence(const Conversation& context, const PromptEngine& engine,
                                          Condition condition);

/// Runs the three tasks for one (user, run). Transport and protocol errors
/// propagate; unusable answers are re-asked once, then recorded as missing.
SessionResult run_session(const StudyDesign& design, const PromptEngine& engine,
                          const LlmUser& user, int run_id, const SessionOptions& options,
                          CachedChatClient& client);

class TrialLogWriter;

struct StudyRunOptions {
  SessionOptions session;
  int concurrency = 1;
  /// Records from an interrupted earlier attempt. Sessions that are complete
  /// here are reused instead of re-run.
  std::vector<TrialRecord> resume_from;
  /// Receives each completed session as it finishes.
  TrialLogWriter* log = nullptr;
};

/// Executes every (user, run) session; returns all records in protocol order.
/// After the first failing session no new sessions start; the error is
/// rethrown once in-flight sessions finish.
std::vector<TrialRecord> run_study(const StudyDesign& design, const PromptEngine& engine,
                                   const std::vector<LlmUser>& users,
                                   const StudyRunOptions& options, CachedChatClient& client);

}  // namespace panelist

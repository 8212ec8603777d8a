#pragma once

#include <array>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "panelist/chat.hpp"
#include "panelist/study.hpp"

namespace panelist {

enum class Task { Helpfulness, Prediction, Confidence };

std::string_view to_string(Task t);
std::optional<Task> parse_task(std::string_view s);

/// Question templates. `{case}` marks where the serialized case goes.
struct PromptTemplates {
  std::string task1;
  std::string task2_high;
  std::string task2_low;
  std::string task3;

  static PromptTemplates defaults();
};

struct PromptConfig {
  PromptTemplates templates = PromptTemplates::defaults();
  /// Scenario framing per condition, indexed by condition_index().
  std::array<std::string, kConditionCount> preambles = default_preambles();

  static std::array<std::string, kConditionCount> default_preambles();
};

struct PromptBundle {
  std::string system_preamble;
  std::string user_message;
  Task task = Task::Helpfulness;
};

/// Task-1 cases paired with the AI system's prediction, in the LLM-user's
/// permutation order.
struct FewShotContext {
  FamiliarityDomain domain = FamiliarityDomain::High;
  std::vector<std::pair<std::string, std::string>> pairs;  // (case text, completion)
};

/// "Field: value" lines in canonical field order.
std::string render_case(const Case& item);
/// render_case() of the underlying case plus "Prediction:" and "Explanation:" lines.
std::string render_case(const ExplainedCase& item);

class PromptEngine {
 public:
  /// Throws ConfigError if a template lacks its `{case}` placeholder.
  explicit PromptEngine(PromptConfig config = {});

  const PromptConfig& config() const noexcept { return config_; }

  /// Throws SchemaError if the case's explanation type differs from `active`.
  PromptBundle render_task1(const ExplainedCase& item, Condition active) const;
  PromptBundle render_task2(const Case& item, Condition active) const;
  PromptBundle render_task3(Condition active) const;

  /// Re-ask sentence listing the task's answer vocabulary.
  std::string clarification(Task task, FamiliarityDomain domain) const;

  /// Throws SchemaError unless exactly 16 cases are given.
  FewShotContext build_fewshot_context(std::span<const ExplainedCase> task1_cases) const;

  /// The few-shot pairs as alternating user/assistant turns; user turns use
  /// the prediction-task wording.
  Conversation fewshot_messages(const FewShotContext& ctx) const;

 private:
  const std::string& task2_template(FamiliarityDomain d) const;

  PromptConfig config_;
};

}  // namespace panelist

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "panelist/codec.hpp"
#include "panelist/gateway.hpp"
#include "panelist/prompts.hpp"
#include "panelist/study.hpp"

namespace panelist {

/// What a scripted mock knows about the prompt it is answering.
struct MockQuery {
  Task task = Task::Helpfulness;
  Condition condition;
  /// Task-1/2 case; for task 3 the case of the preceding prediction.
  const Case* item = nullptr;
  const ExplainedCase* explained = nullptr;
  /// Canonical position of the case within its condition's task list.
  std::size_t case_position = 0;
  std::uint64_t sample_index = 0;
  /// The last user message is a re-ask after an unusable answer.
  bool reask = false;
  const ChatRequest* request = nullptr;
};

/// Returns the answer text, or nullopt when the policy has nothing scripted.
using MockPolicy = std::function<std::optional<std::string>(const MockQuery&)>;

/// Deterministic test double. Every answer is a pure function of the request;
/// anything unscripted raises UnscriptedPromptError naming the digest of the
/// last user message.
class ScriptedMockClient final : public ChatClient {
 public:
  /// Answers by exact prompt digest (see prompt_digest()) of the last user message.
  explicit ScriptedMockClient(std::map<std::string, std::string> table);

  /// Answers through `policy`, with prompts decoded against `design`.
  ScriptedMockClient(const StudyDesign& design, const PromptEngine& engine, MockPolicy policy);

  ~ScriptedMockClient() override;

  /// Decodes the task and case of a request; nullopt if unrecognized.
  std::optional<MockQuery> decode(const ChatRequest& request) const;

 private:
  std::string do_chat(const ChatRequest& request) override;

  struct Index;
  std::map<std::string, std::string> table_;
  std::unique_ptr<Index> index_;
  MockPolicy policy_;
};

namespace mock_policies {

/// "Agree" / first domain label / "Fairly confident" for every prompt.
MockPolicy always_agree();
/// "Strongly agree" / first domain label / "Very confident".
MockPolicy always_strongly_agree();
/// Pseudo-random but deterministic answers keyed by (case id, task, sample index).
MockPolicy hashed();
/// Pseudo-random answers keyed by case id and task only, ignoring context and
/// sample index.
MockPolicy case_keyed();
/// Answers whose two-way ANOVA reproduces `reference`'s significance and
/// direction pattern for all nine (measure, effect) entries.
MockPolicy engineered(const HumanReference& reference, AccuracyOracle oracle);

}  // namespace mock_policies

/// Resolves a CLI policy name: always-agree, always-strongly-agree, hashed,
/// case-keyed, engineered. `reference` is required for engineered.
MockPolicy mock_policy_by_name(std::string_view name, const HumanReference* reference,
                               AccuracyOracle oracle);

}  // namespace panelist

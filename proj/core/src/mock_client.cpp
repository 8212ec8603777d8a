#include "panelist/mock_client.hpp"

#include <set>
#include <unordered_map>

#include "panelist/digest.hpp"
#include "panelist/error.hpp"

namespace panelist {

namespace {

struct PromptEntry {
  Task task;
  Condition condition;
  const Case* item;
  const ExplainedCase* explained;
  std::size_t position;
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_text(std::string_view s) {
  return std::stoull(sha256_hex(s).substr(0, 16), nullptr, 16);
}

std::string first_label(const MockQuery& q) {
  return std::string(label_text(labels_for(q.condition.familiarity)[0]));
}

}  // namespace

struct ScriptedMockClient::Index {
  StudyDesign design;
  // Identical case text may occur in several conditions, hence a list.
  std::unordered_map<std::string, std::vector<PromptEntry>> prompts;
  std::unordered_map<std::string, std::set<Condition>> preambles;
  std::string task3_text;
  std::set<std::string> clarifications;

  const std::vector<PromptEntry>* lookup(const std::string& text) const {
    const auto it = prompts.find(text);
    return it == prompts.end() ? nullptr : &it->second;
  }

  // Picks the entry whose condition agrees with the rest of the
  // conversation: the system preamble and any task-1 prompt.
  const PromptEntry* resolve(const std::vector<PromptEntry>& candidates, const Conversation& msgs) const {
    if (candidates.size() == 1) return &candidates.front();
    std::set<Condition> allowed;
    for (const auto& e : candidates) allowed.insert(e.condition);
    auto narrow = [&](const std::set<Condition>& by) {
      std::set<Condition> kept;
      for (const auto& c : allowed) {
        if (by.count(c)) kept.insert(c);
      }
      if (!kept.empty()) allowed = std::move(kept);
    };
    for (const auto& m : msgs) {
      if (allowed.size() == 1) break;
      if (m.role == Role::System) {
        if (const auto it = preambles.find(m.content); it != preambles.end()) narrow(it->second);
      } else if (m.role == Role::User) {
        const auto* entries = lookup(m.content);
        if (!entries || entries->front().task != Task::Helpfulness) continue;
        std::set<Condition> seen;
        for (const auto& e : *entries) seen.insert(e.condition);
        narrow(seen);
      }
    }
    for (const auto& e : candidates) {
      if (allowed.count(e.condition)) return &e;
    }
    return &candidates.front();
  }
};

ScriptedMockClient::ScriptedMockClient(std::map<std::string, std::string> table)
    : table_(std::move(table)) {}

ScriptedMockClient::ScriptedMockClient(const StudyDesign& design, const PromptEngine& engine,
                                       MockPolicy policy)
    : index_(std::make_unique<Index>()), policy_(std::move(policy)) {
  index_->design = design;
  for (const auto& cc : index_->design.conditions) {
    for (std::size_t i = 0; i < cc.task1.size(); ++i) {
      const auto& ec = cc.task1[i];
      index_->prompts[engine.render_task1(ec, cc.condition).user_message].push_back(
          PromptEntry{Task::Helpfulness, cc.condition, &ec.item, &ec, i});
    }
    for (std::size_t i = 0; i < cc.task2.size(); ++i) {
      const auto& c = cc.task2[i];
      index_->prompts[engine.render_task2(c, cc.condition).user_message].push_back(
          PromptEntry{Task::Prediction, cc.condition, &c, nullptr, i});
    }
    const auto& pre = engine.config().preambles[condition_index(cc.condition)];
    if (!pre.empty()) index_->preambles[pre].insert(cc.condition);
    for (auto t : {Task::Helpfulness, Task::Prediction, Task::Confidence}) {
      index_->clarifications.insert(engine.clarification(t, cc.condition.familiarity));
    }
  }
  index_->task3_text = engine.render_task3(kAllConditions[0]).user_message;
}

ScriptedMockClient::~ScriptedMockClient() = default;

std::optional<MockQuery> ScriptedMockClient::decode(const ChatRequest& request) const {
  if (!index_) return std::nullopt;
  const auto& msgs = request.messages;

  // Latest task-1/2 prompt strictly before `end`, skipping re-asks and task-3 turns.
  auto find_prompt = [&](std::size_t end) -> const PromptEntry* {
    for (std::size_t i = end; i-- > 0;) {
      if (msgs[i].role != Role::User) continue;
      if (const auto* entries = index_->lookup(msgs[i].content)) return index_->resolve(*entries, msgs);
      if (msgs[i].content == index_->task3_text ||
          index_->clarifications.count(msgs[i].content) != 0) {
        continue;
      }
      return nullptr;
    }
    return nullptr;
  };

  std::size_t last = msgs.size() - 1;
  MockQuery q;
  q.sample_index = request.sample_index;
  q.request = &request;
  if (index_->clarifications.count(msgs[last].content) != 0) {
    q.reask = true;
    // The prompt being re-asked is the nearest earlier user turn that is a prompt.
    std::size_t i = last;
    while (i-- > 0) {
      if (msgs[i].role != Role::User) continue;
      if (index_->clarifications.count(msgs[i].content) != 0) continue;
      break;
    }
    if (i >= last) return std::nullopt;
    last = i;
  }
  const auto& text = msgs[last].content;
  const PromptEntry* entry = nullptr;
  if (text == index_->task3_text) {
    entry = find_prompt(last);
    if (!entry || entry->task != Task::Prediction) return std::nullopt;
    q.task = Task::Confidence;
  } else if (const auto* entries = index_->lookup(text)) {
    entry = index_->resolve(*entries, msgs);
    q.task = entry->task;
  } else {
    return std::nullopt;
  }
  q.condition = entry->condition;
  q.item = entry->item;
  q.explained = entry->explained;
  q.case_position = entry->position;
  return q;
}

std::string ScriptedMockClient::do_chat(const ChatRequest& request) {
  const auto& last = request.messages.back().content;
  const auto digest = prompt_digest(last);
  if (!index_) {
    if (auto it = table_.find(digest); it != table_.end()) return it->second;
    throw UnscriptedPromptError(digest);
  }
  const auto q = decode(request);
  if (!q) throw UnscriptedPromptError(digest);
  auto answer = policy_(*q);
  if (!answer) throw UnscriptedPromptError(digest);
  return *answer;
}

namespace mock_policies {

MockPolicy always_agree() {
  return [](const MockQuery& q) -> std::optional<std::string> {
    switch (q.task) {
      case Task::Helpfulness: return "Agree";
      case Task::Prediction: return first_label(q);
      case Task::Confidence: return "Fairly confident";
    }
    return std::nullopt;
  };
}

MockPolicy always_strongly_agree() {
  return [](const MockQuery& q) -> std::optional<std::string> {
    switch (q.task) {
      case Task::Helpfulness: return "Strongly agree";
      case Task::Prediction: return first_label(q);
      case Task::Confidence: return "Very confident";
    }
    return std::nullopt;
  };
}

namespace {

MockPolicy keyed(bool use_sample) {
  return [use_sample](const MockQuery& q) -> std::optional<std::string> {
    std::string key = q.item->id + "|" + std::string(to_string(q.task));
    if (use_sample) key += "|" + std::to_string(q.sample_index);
    const auto h = hash_text(key);
    switch (q.task) {
      case Task::Helpfulness:
        return std::string(likert_label(LikertScale::Agreement, static_cast<int>(h % 5) + 1));
      case Task::Prediction:
        return std::string(label_text(labels_for(q.condition.familiarity)[h % 2]));
      case Task::Confidence:
        return std::string(likert_label(LikertScale::Confidence, static_cast<int>(h % 5) + 1));
    }
    return std::nullopt;
  };
}

int sign_of(const EffectVerdict& v) {
  return v.significant ? static_cast<int>(v.direction) : 0;
}

}  // namespace

MockPolicy hashed() { return keyed(true); }

MockPolicy case_keyed() { return keyed(false); }

MockPolicy engineered(const HumanReference& reference, AccuracyOracle oracle) {
  // Cell mean = centre + step * (aF*f + aE*e + aI*f*e) with f, e = +-1 and
  // a* the signed significance of each effect. A participant offset that
  // depends only on the sample index is shared by all four cells, so null
  // effects have exactly zero contrast while within-cell variance stays > 0.
  std::array<std::array<int, 3>, 3> coef{};
  for (auto m : kAllMeasures) {
    for (auto e : kAllEffects) {
      coef[static_cast<std::size_t>(m)][static_cast<std::size_t>(e)] =
          sign_of(reference.effect(m, e));
    }
  }
  return [coef, oracle](const MockQuery& q) -> std::optional<std::string> {
    const Measure m = q.task == Task::Helpfulness  ? Measure::Helpfulness
                      : q.task == Task::Prediction ? Measure::Accuracy
                                                   : Measure::Confidence;
    const auto& a = coef[static_cast<std::size_t>(m)];
    const int f = q.condition.familiarity == FamiliarityDomain::High ? 1 : -1;
    const int e = q.condition.explanation == ExplanationType::Counterfactual ? 1 : -1;
    // Contrast in units of 1/16 of an item.
    const int units = a[0] * f + a[1] * e + a[2] * f * e;
    const auto noise = splitmix64(q.sample_index);
    const auto pos = static_cast<int>(q.case_position);

    if (m == Measure::Accuracy) {
      const int correct_items = 8 + 2 * units + static_cast<int>(noise % 3);
      const auto& target = oracle == AccuracyOracle::TruthLabel ? q.item->truth_label
                                                                : q.item->ai_prediction;
      if (!target) return std::nullopt;
      const auto label = pos < correct_items ? *target : opposite(*target);
      return std::string(label_text(label));
    }
    // Target item total 48 + 4*units out of 16 items (mean 3 +- 0.25*units).
    const int total = 48 + 4 * units;
    const int base = total / 16;
    const int extra = total % 16;
    const int code = base + (pos < extra ? 1 : 0) + (pos < static_cast<int>(noise % 5) ? 1 : 0);
    const auto scale = m == Measure::Helpfulness ? LikertScale::Agreement : LikertScale::Confidence;
    return std::string(likert_label(scale, code));
  };
}

}  // namespace mock_policies

MockPolicy mock_policy_by_name(std::string_view name, const HumanReference* reference,
                               AccuracyOracle oracle) {
  if (name == "always-agree") return mock_policies::always_agree();
  if (name == "always-strongly-agree") return mock_policies::always_strongly_agree();
  if (name == "hashed") return mock_policies::hashed();
  if (name == "case-keyed") return mock_policies::case_keyed();
  if (name == "engineered") {
    if (!reference) throw ConfigError("mock policy 'engineered' needs a human reference");
    return mock_policies::engineered(*reference, oracle);
  }
  throw ConfigError("unknown mock policy '" + std::string(name) +
                    "' (expected always-agree, always-strongly-agree, hashed, case-keyed or "
                    "engineered)");
}

}  // namespace panelist

#include "panelist/prompts.hpp"

#include <algorithm>

#include "panelist/codec.hpp"
#include "panelist/error.hpp"

namespace panelist {

namespace {

constexpr std::string_view kPlaceholder = "{case}";

constexpr std::string_view kTask1Question =
    "Given the following case, how would you rate the sentence \"This explanation was "
    "helpful\"? You must answer by only providing one value from the following: \"Strongly "
    "disagree\", \"Disagree\", \"Neutral\", \"Agree\", \"Strongly agree\".";

constexpr std::string_view kTask2HighQuestion =
    "Complete the sentence \"Based on the information provided, I believe the app's prediction "
    "for this person will be ...\". You must answer by only providing one value from the "
    "following: Over the limit, Under the limit.";

constexpr std::string_view kTask2LowQuestion =
    "Complete the sentence \"Based on the information provided, I believe the app's prediction "
    "for this chemical will be ...\". You must answer by only providing one value from the "
    "following: Safe, Not safe.";

constexpr std::string_view kTask3Question =
    "How confident are you in your prediction? You must answer by only providing one value from "
    "the following: \"Not at all confident\", \"Not very confident\", \"Neither\", \"Fairly "
    "confident\", \"Very confident\".";

std::string with_case(std::string_view question) {
  return std::string(question) + "\n\n" + std::string(kPlaceholder);
}

std::string substitute(const std::string& tmpl, const std::string& case_text) {
  const auto pos = tmpl.find(kPlaceholder);
  std::string out = tmpl;
  out.replace(pos, kPlaceholder.size(), case_text);
  return out;
}

void require_placeholder(const std::string& tmpl, std::string_view name) {
  const auto first = tmpl.find(kPlaceholder);
  if (first == std::string::npos ||
      tmpl.find(kPlaceholder, first + kPlaceholder.size()) != std::string::npos) {
    throw ConfigError("template '" + std::string(name) + "' must contain exactly one {case}");
  }
}

std::string quoted_list(const std::array<std::string_view, 5>& labels) {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out += ", ";
    out += "\"" + std::string(labels[i]) + "\"";
  }
  return out;
}

}  // namespace

std::string_view to_string(Task t) {
  switch (t) {
    case Task::Helpfulness: return "helpfulness";
    case Task::Prediction: return "prediction";
    case Task::Confidence: return "confidence";
  }
  return "";
}

std::optional<Task> parse_task(std::string_view s) {
  for (auto t : {Task::Helpfulness, Task::Prediction, Task::Confidence}) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

PromptTemplates PromptTemplates::defaults() {
  return {with_case(kTask1Question), with_case(kTask2HighQuestion), with_case(kTask2LowQuestion),
          std::string(kTask3Question)};
}

std::array<std::string, kConditionCount> PromptConfig::default_preambles() {
  const std::string high =
      "You are a participant in a user study. You will be shown cases from an app that uses "
      "artificial intelligence to predict whether a person's blood alcohol level is over or under "
      "the legal limit for driving.";
  const std::string low =
      "You are a participant in a user study. You will be shown cases from an app that uses "
      "artificial intelligence to predict whether a chemical compound is safe or not safe.";
  const std::string tail =
      " In the first part, the app shows its prediction together with an explanation and you "
      "rate the explanation. In the second part, you predict what the app will say and rate your "
      "confidence.";
  return {high + tail, high + tail, low + tail, low + tail};
}

std::string render_case(const Case& item) {
  const auto fields = required_fields(item.domain);
  std::string out;
  for (std::size_t i = 0; i < item.features.size(); ++i) {
    const auto& f = item.features[i];
    const auto it = std::find_if(fields.begin(), fields.end(),
                                 [&](const FieldSpec& s) { return s.key == f.name; });
    const std::string display = it != fields.end() ? std::string(it->display) : f.name;
    if (i) out += '\n';
    out += display + ": " + f.value;
  }
  return out;
}

std::string render_case(const ExplainedCase& item) {
  return render_case(item.item) + "\nPrediction: " + std::string(label_text(item.ai_prediction)) +
         "\nExplanation: " + item.explanation_text;
}

PromptEngine::PromptEngine(PromptConfig config) : config_(std::move(config)) {
  require_placeholder(config_.templates.task1, "task1");
  require_placeholder(config_.templates.task2_high, "task2_high");
  require_placeholder(config_.templates.task2_low, "task2_low");
}

const std::string& PromptEngine::task2_template(FamiliarityDomain d) const {
  return d == FamiliarityDomain::High ? config_.templates.task2_high : config_.templates.task2_low;
}

PromptBundle PromptEngine::render_task1(const ExplainedCase& item, Condition active) const {
  if (item.explanation_type != active.explanation || item.item.domain != active.familiarity) {
    throw SchemaError("case '" + item.item.id + "' served under condition '" +
                      condition_key(active) + "' it does not belong to");
  }
  return {config_.preambles[condition_index(active)],
          substitute(config_.templates.task1, render_case(item)), Task::Helpfulness};
}

PromptBundle PromptEngine::render_task2(const Case& item, Condition active) const {
  if (item.domain != active.familiarity) {
    throw SchemaError("case '" + item.id + "' served under condition '" + condition_key(active) +
                      "' it does not belong to");
  }
  return {config_.preambles[condition_index(active)],
          substitute(task2_template(item.domain), render_case(item)), Task::Prediction};
}

PromptBundle PromptEngine::render_task3(Condition active) const {
  return {config_.preambles[condition_index(active)], config_.templates.task3, Task::Confidence};
}

std::string PromptEngine::clarification(Task task, FamiliarityDomain domain) const {
  const std::string lead = "You must answer by only providing one value from the following: ";
  switch (task) {
    case Task::Helpfulness:
      return lead + quoted_list(likert_labels(LikertScale::Agreement)) + ".";
    case Task::Prediction: {
      const auto labels = labels_for(domain);
      return lead + std::string(label_text(labels[0])) + ", " + std::string(label_text(labels[1])) +
             ".";
    }
    case Task::Confidence:
      return lead + quoted_list(likert_labels(LikertScale::Confidence)) + ".";
  }
  return lead;
}

FewShotContext PromptEngine::build_fewshot_context(std::span<const ExplainedCase> task1_cases) const {
  if (task1_cases.size() != kCasesPerTask) {
    throw SchemaError("few-shot context needs exactly 16 task1 cases, got " +
                      std::to_string(task1_cases.size()));
  }
  FewShotContext ctx;
  ctx.domain = task1_cases.front().item.domain;
  ctx.pairs.reserve(task1_cases.size());
  for (const auto& ec : task1_cases) {
    if (ec.item.domain != ctx.domain) {
      throw SchemaError("few-shot context mixes familiarity domains (case '" + ec.item.id + "')");
    }
    ctx.pairs.emplace_back(render_case(ec.item), std::string(label_text(ec.ai_prediction)));
  }
  return ctx;
}

Conversation PromptEngine::fewshot_messages(const FewShotContext& ctx) const {
  Conversation out;
  out.reserve(2 * ctx.pairs.size());
  for (const auto& [case_text, completion] : ctx.pairs) {
    out.push_back({Role::User, substitute(task2_template(ctx.domain), case_text)});
    out.push_back({Role::Assistant, completion});
  }
  return out;
}

}  // namespace panelist

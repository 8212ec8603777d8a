#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace panelist {

/// Scenario familiarity. High is the blood-alcohol scenario, Low the chemical-safety one.
enum class FamiliarityDomain { High, Low };

enum class ExplanationType { Causal, Counterfactual };

/// Answer space of the prediction task. The first two belong to the High
/// domain, the last two to the Low domain.
enum class BinaryLabel { OverTheLimit, UnderTheLimit, Safe, NotSafe };

struct Condition {
  FamiliarityDomain familiarity = FamiliarityDomain::High;
  ExplanationType explanation = ExplanationType::Causal;

  friend constexpr auto operator<=>(const Condition&, const Condition&) = default;
};

inline constexpr std::size_t kConditionCount = 4;
inline constexpr std::size_t kCasesPerTask = 16;

/// The 2x2 grid in canonical order: high/causal, high/counterfactual,
/// low/causal, low/counterfactual.
inline constexpr std::array<Condition, kConditionCount> kAllConditions = {{
    {FamiliarityDomain::High, ExplanationType::Causal},
    {FamiliarityDomain::High, ExplanationType::Counterfactual},
    {FamiliarityDomain::Low, ExplanationType::Causal},
    {FamiliarityDomain::Low, ExplanationType::Counterfactual},
}};

constexpr std::size_t condition_index(Condition c) {
  return (c.familiarity == FamiliarityDomain::High ? 0U : 2U) +
         (c.explanation == ExplanationType::Causal ? 0U : 1U);
}

std::string_view to_string(FamiliarityDomain d);
std::string_view to_string(ExplanationType e);
/// "high_causal", "low_counterfactual", ...
std::string condition_key(Condition c);
std::optional<Condition> parse_condition_key(std::string_view key);
std::optional<FamiliarityDomain> parse_domain(std::string_view s);
std::optional<ExplanationType> parse_explanation_type(std::string_view s);

FamiliarityDomain domain_of(BinaryLabel label);
std::array<BinaryLabel, 2> labels_for(FamiliarityDomain d);
BinaryLabel opposite(BinaryLabel label);
/// Snake-case file form: "over_the_limit", "not_safe", ...
std::string_view label_key(BinaryLabel label);
/// Display form used in prompts: "Over the limit", "Not safe", ...
std::string_view label_text(BinaryLabel label);
std::optional<BinaryLabel> parse_label_key(std::string_view key);

struct FieldSpec {
  std::string_view key;
  std::string_view display;
};

/// Required case fields of a domain, in canonical order.
std::span<const FieldSpec> required_fields(FamiliarityDomain d);

struct Feature {
  std::string name;  // FieldSpec::key
  std::string value;

  friend bool operator==(const Feature&, const Feature&) = default;
};

struct Case {
  std::string id;
  FamiliarityDomain domain = FamiliarityDomain::High;
  std::vector<Feature> features;  // canonical order
  std::optional<BinaryLabel> truth_label;
  /// Prediction of the AI system for this case, when the dataset has one.
  std::optional<BinaryLabel> ai_prediction;

  friend bool operator==(const Case&, const Case&) = default;
};

struct ExplainedCase {
  Case item;
  BinaryLabel ai_prediction = BinaryLabel::OverTheLimit;
  std::string explanation_text;
  ExplanationType explanation_type = ExplanationType::Causal;

  friend bool operator==(const ExplainedCase&, const ExplainedCase&) = default;
};

enum class InterleavePolicy {
  /// One confidence question right after every prediction.
  Alternate,
};

struct ConditionCases {
  Condition condition;
  std::vector<ExplainedCase> task1;
  std::vector<Case> task2;

  friend bool operator==(const ConditionCases&, const ConditionCases&) = default;
};

struct StudyDesign {
  /// Always four entries, indexed by condition_index().
  std::vector<ConditionCases> conditions;
  InterleavePolicy interleave = InterleavePolicy::Alternate;
  int n_llm_users = 40;
  int runs_per_user = 1;
  std::uint64_t seed = 0;

  const ConditionCases& cases_for(Condition c) const;
  const Case* find_task2_case(std::string_view id) const;
  const ExplainedCase* find_task1_case(std::string_view id) const;

  friend bool operator==(const StudyDesign&, const StudyDesign&) = default;
};

/// Throws SchemaError on any invariant violation.
void validate(const StudyDesign& design);

StudyDesign parse_cases(std::string_view json_text);
StudyDesign load_cases(const std::filesystem::path& path);
/// Canonical JSON form; parse_cases(serialize_cases(d)) == d.
std::string serialize_cases(const StudyDesign& design);

enum class Measure { Helpfulness, Accuracy, Confidence };
enum class Effect { Familiarity, Explanation, Interaction };

inline constexpr std::array<Measure, 3> kAllMeasures = {Measure::Helpfulness, Measure::Accuracy,
                                                        Measure::Confidence};
inline constexpr std::array<Effect, 3> kAllEffects = {Effect::Familiarity, Effect::Explanation,
                                                      Effect::Interaction};

std::string_view to_string(Measure m);
std::string_view to_string(Effect e);
std::optional<Measure> parse_measure(std::string_view s);
std::optional<Effect> parse_effect(std::string_view s);

/// Direction of an effect contrast.
/// Familiarity: sign(mean High - mean Low). Explanation: sign(mean
/// Counterfactual - mean Causal). Interaction: sign of
/// (HighCF - HighCausal) - (LowCF - LowCausal).
enum class Sign { Negative = -1, None = 0, Positive = 1 };

std::string_view to_string(Sign s);
std::optional<Sign> parse_sign(std::string_view s);

struct EffectVerdict {
  bool significant = false;
  Sign direction = Sign::None;

  friend bool operator==(const EffectVerdict&, const EffectVerdict&) = default;
};

using CaseMeans = std::map<std::string, double, std::less<>>;

struct HumanReference {
  /// [measure][condition_index]
  std::array<std::array<double, kConditionCount>, 3> means{};
  /// [measure][effect]
  std::array<std::array<EffectVerdict, 3>, 3> effects{};
  /// Per-case human means keyed by case id, when published.
  std::optional<std::array<std::array<CaseMeans, kConditionCount>, 3>> per_case_means;

  double mean(Measure m, Condition c) const;
  const EffectVerdict& effect(Measure m, Effect e) const;
};

HumanReference parse_human_reference(std::string_view json_text);
HumanReference load_human_reference(const std::filesystem::path& path);
std::string serialize_human_reference(const HumanReference& ref);

}  // namespace panelist

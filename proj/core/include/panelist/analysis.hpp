#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "panelist/anova.hpp"
#include "panelist/normality.hpp"
#include "panelist/session.hpp"
#include "panelist/study.hpp"

namespace panelist {

inline constexpr double kAlpha = 0.05;
/// A run missing more than this fraction of any task's answers is excluded.
inline constexpr double kMaxMissingFraction = 0.20;

enum class AggregationMode {
  /// One participant per LLM-user: per-question means across runs first.
  Aggregated,
  /// Every (user, run) is its own participant.
  PerRun,
};

std::string_view to_string(AggregationMode m);

struct ParticipantScore {
  std::string participant_id;
  Condition condition;
  Measure measure = Measure::Helpfulness;
  /// Mean Likert code (1..5) or accuracy proportion (0..1).
  double value = 0.0;

  friend bool operator==(const ParticipantScore&, const ParticipantScore&) = default;
};

struct Exclusion {
  std::string participant_id;  // "u0003" or "u0003/r1"
  std::string reason;
};

struct AggregationResult {
  std::vector<ParticipantScore> scores;
  std::vector<Exclusion> exclusions;
  /// Per-case means over every included answer, [measure][condition].
  std::array<std::array<CaseMeans, kConditionCount>, 3> per_case_means;
};

AggregationResult aggregate(std::span<const TrialRecord> trials, AggregationMode mode);

/// Scores of one measure grouped into cells.
CellScores cells_for(std::span<const ParticipantScore> scores, Measure measure);

struct EffectOutcome {
  Measure measure = Measure::Helpfulness;
  Effect effect = Effect::Familiarity;
  /// False when the ANOVA could not be computed (see MeasureAnalysis::error).
  bool determined = false;
  bool significant = false;
  /// Defined only when significant; otherwise None.
  Sign direction = Sign::None;
  std::optional<double> f;
  std::optional<double> p;
  bool normality_flag = false;
};

struct MeasureAnalysis {
  Measure measure = Measure::Helpfulness;
  std::optional<AnovaTable> anova;
  std::string error;
  NormalityReport normality;
  std::array<double, kConditionCount> cell_means{};
  std::array<std::size_t, kConditionCount> cell_sizes{};
  std::array<EffectOutcome, 3> outcomes;
};

/// ANOVA, normality gate and effect outcomes for one measure. ANOVA failures
/// are captured in `error` and leave the outcomes undetermined.
MeasureAnalysis analyze_measure(std::span<const ParticipantScore> scores, Measure measure,
                                double alpha = kAlpha);

enum class MseGranularity { PerCondition, PerCase };

std::string_view to_string(MseGranularity g);
std::optional<MseGranularity> parse_mse_granularity(std::string_view s);

struct MseEntry {
  Measure measure;
  Condition condition;
  double mse = 0.0;
  double llm_mean = 0.0;
  double human_mean = 0.0;
  std::size_t cases = 0;  // 0 for per-condition
};

/// `llm_means` is [measure][condition]. Throws SchemaError if per-case data is
/// requested but the reference has none (fall back to PerCondition).
std::vector<MseEntry> mse_vs_human(const std::array<std::array<double, kConditionCount>, 3>& llm_means,
                                   const std::array<std::array<CaseMeans, kConditionCount>, 3>& llm_case_means,
                                   const HumanReference& human, MseGranularity granularity);

struct ConcordanceEntry {
  Measure measure;
  Effect effect;
  bool llm_determined = true;
  EffectVerdict llm;
  EffectVerdict human;
  bool concordant = false;
};

struct ConcordanceReport {
  std::array<ConcordanceEntry, 9> entries;
  int concordant_count = 0;
};

/// Concordant iff both sides agree on significance and, when both are
/// significant, on direction. `llm` must hold all nine (measure, effect)
/// pairs; throws SchemaError otherwise.
ConcordanceReport concordance(std::span<const EffectOutcome> llm, const HumanReference& human);

/// Outcomes as a reference-shaped verdict table, e.g. to compare two LLM runs.
HumanReference as_reference(std::span<const EffectOutcome> outcomes,
                            const std::array<std::array<double, kConditionCount>, 3>& means);

}  // namespace panelist

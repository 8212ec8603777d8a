#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "panelist/analysis.hpp"
#include "panelist/session.hpp"

namespace panelist {

/// Statistics of one (model, memory mode, aggregation) setting.
struct ModelReport {
  std::string model_id;
  MemoryMode mode = MemoryMode::WithMemory;
  AggregationMode aggregation = AggregationMode::Aggregated;
  MseGranularity granularity = MseGranularity::PerCondition;
  std::size_t records = 0;
  std::size_t parsed = 0;
  std::size_t runs = 0;
  std::array<MeasureAnalysis, 3> measures;
  ConcordanceReport concordance;
  std::vector<MseEntry> mse;
  std::vector<Exclusion> exclusions;
  std::string reference_sha256;

  double parse_rate() const;
};

/// Full pipeline over one model's log. Throws SchemaError when the log mixes
/// models or memory modes.
ModelReport build_report(std::span<const TrialRecord> trials, const HumanReference& reference,
                         std::string reference_sha256, AggregationMode aggregation,
                         MseGranularity granularity);

/// Shortest round-trip decimal form.
std::string format_number(double v);

std::string anova_json(const ModelReport& r);
/// Columns: measure, effect, llm_significant, llm_direction, llm_f, llm_p,
/// human_significant, human_direction, concordant. Nine rows, then a
/// `summary` row whose concordant column holds "k/9".
std::string concordance_csv(const ModelReport& r);
/// Columns: measure, condition, granularity, llm_mean, human_mean, mse, cases.
std::string mse_csv(const ModelReport& r);
std::string report_text(const ModelReport& r);
std::string summary_json(const ModelReport& r);

/// Directory name of a setting: `<model>__<mode>__<aggregation>`.
std::string setting_slug(const ModelReport& r);
/// Writes the five report files into `dir`.
void write_report_set(const ModelReport& r, const std::filesystem::path& dir);

/// Concordance grid: one row per (measure, effect) and, per setting, the
/// LLM outcome ("sig+", "sig-", "ns", "undetermined") and a 0/1 concordance
/// column. Closes with a `total` row of k per setting.
std::string concordance_grid_csv(std::span<const ModelReport> reports);

/// What `compare` needs from an analyzed setting.
struct SettingSummary {
  std::string model_id;
  std::string mode;
  std::string aggregation;
  std::string reference_sha256;
  int concordant = 0;
  std::array<bool, 9> entries{};
};

SettingSummary parse_summary_json(std::string_view text);

/// Columns: model, memory_mode, aggregation, concordant, total.
std::string settings_comparison_csv(std::span<const SettingSummary> settings);

struct AggregationDelta {
  std::string model_id;
  std::string mode;
  int aggregated = 0;
  int per_run = 0;
};

/// Pairs aggregated and per-run settings of the same (model, mode).
std::vector<AggregationDelta> aggregation_deltas(std::span<const SettingSummary> settings);
/// Columns: model, memory_mode, aggregated, per_run, delta; then a
/// `tally` row "improved X of Y".
std::string aggregation_effect_csv(std::span<const AggregationDelta> deltas);

}  // namespace panelist

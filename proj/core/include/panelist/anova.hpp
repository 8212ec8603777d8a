#pragma once

#include <array>
#include <optional>
#include <vector>

#include "panelist/study.hpp"

namespace panelist {

/// Participant scores per cell, indexed by condition_index().
using CellScores = std::array<std::vector<double>, kConditionCount>;

struct AnovaRow {
  double ss = 0.0;
  int df = 0;
  double ms = 0.0;
  std::optional<double> f;  // effects only
  std::optional<double> p;  // effects only
};

/// Fixed-effects decomposition; familiarity is the row factor and
/// explanation type the column factor.
struct AnovaTable {
  AnovaRow familiarity;
  AnovaRow explanation;
  AnovaRow interaction;
  AnovaRow within;
  double ss_total = 0.0;
  int df_total = 0;
  int n_per_cell = 0;
  double grand_mean = 0.0;
  std::array<double, kConditionCount> cell_means{};

  const AnovaRow& effect(Effect e) const;
  /// Level-mean difference for main effects, difference of differences for
  /// the interaction. Its sign is the effect direction (see Sign).
  double contrast(Effect e) const;
};

/// Requires 4 cells of equal size n >= 2. Throws StatsError for unbalanced
/// cells or zero within-cell variance.
AnovaTable two_way_anova(const CellScores& cells);

}  // namespace panelist

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>

#include "panelist/anova.hpp"

namespace panelist {

struct ShapiroWilk {
  double w = 0.0;
  double p = 0.0;
};

/// Shapiro-Wilk test using Royston's approximation (valid for 3 <= n <= 5000).
/// Throws StatsError outside that range or when all values are identical.
ShapiroWilk shapiro_wilk(std::span<const double> sample);

struct CellNormality {
  std::size_t n = 0;
  std::optional<ShapiroWilk> test;
  bool pass = false;
  /// Why no test ran, when `test` is empty.
  std::string note;
};

struct NormalityReport {
  std::array<CellNormality, kConditionCount> cells;
  /// Set when any cell fails or cannot be tested; results should then be
  /// read with caution.
  bool flag = false;
};

NormalityReport normality_check(const CellScores& cells, double alpha = 0.05);

}  // namespace panelist

#include "panelist/anova.hpp"

#include <cmath>
#include <numeric>

#include "panelist/distributions.hpp"
#include "panelist/error.hpp"

namespace panelist {

namespace {

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

AnovaRow effect_row(double ss, double ms_within, int df_within) {
  AnovaRow r;
  r.ss = ss;
  r.df = 1;
  r.ms = ss;
  r.f = r.ms / ms_within;
  r.p = f_sf(*r.f, 1.0, static_cast<double>(df_within));
  return r;
}

}  // namespace

const AnovaRow& AnovaTable::effect(Effect e) const {
  switch (e) {
    case Effect::Familiarity: return familiarity;
    case Effect::Explanation: return explanation;
    case Effect::Interaction: return interaction;
  }
  return familiarity;
}

double AnovaTable::contrast(Effect e) const {
  const auto& m = cell_means;  // high_causal, high_cf, low_causal, low_cf
  switch (e) {
    case Effect::Familiarity: return (m[0] + m[1]) / 2.0 - (m[2] + m[3]) / 2.0;
    case Effect::Explanation: return (m[1] + m[3]) / 2.0 - (m[0] + m[2]) / 2.0;
    case Effect::Interaction: return (m[1] - m[0]) - (m[3] - m[2]);
  }
  return 0.0;
}

AnovaTable two_way_anova(const CellScores& cells) {
  const auto n = cells[0].size();
  for (const auto& c : cells) {
    if (c.size() != n) {
      throw StatsError("unbalanced cells: two-way ANOVA needs equal cell sizes (got " +
                       std::to_string(cells[0].size()) + ", " + std::to_string(cells[1].size()) +
                       ", " + std::to_string(cells[2].size()) + ", " +
                       std::to_string(cells[3].size()) + ")");
    }
  }
  if (n < 2) throw StatsError("two-way ANOVA needs at least 2 observations per cell");

  AnovaTable t;
  t.n_per_cell = static_cast<int>(n);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < kConditionCount; ++i) {
    t.cell_means[i] = mean(cells[i]);
    for (double x : cells[i]) {
      sum += x;
      sum_sq += x * x;
    }
  }
  const double total_n = 4.0 * static_cast<double>(n);
  t.grand_mean = sum / total_n;
  const auto& m = t.cell_means;
  const double g = (m[0] + m[1] + m[2] + m[3]) / 4.0;
  const double high = (m[0] + m[1]) / 2.0;
  const double low = (m[2] + m[3]) / 2.0;
  const double causal = (m[0] + m[2]) / 2.0;
  const double cf = (m[1] + m[3]) / 2.0;
  const double nd = static_cast<double>(n);

  const double ss_a = 2.0 * nd * ((high - g) * (high - g) + (low - g) * (low - g));
  const double ss_b = 2.0 * nd * ((causal - g) * (causal - g) + (cf - g) * (cf - g));
  const double row_mean[4] = {high, high, low, low};
  const double col_mean[4] = {causal, cf, causal, cf};
  double ss_ab = 0.0;
  double ss_w = 0.0;
  double ss_t = 0.0;
  for (std::size_t i = 0; i < kConditionCount; ++i) {
    const double r = m[i] - row_mean[i] - col_mean[i] + g;
    ss_ab += nd * r * r;
    for (double x : cells[i]) {
      ss_w += (x - m[i]) * (x - m[i]);
      ss_t += (x - g) * (x - g);
    }
  }

  const int df_w = static_cast<int>(total_n) - 4;
  if (ss_w <= 1e-24 * std::max(1.0, sum_sq)) {
    throw StatsError("degenerate variance: every cell has zero within-cell variance");
  }
  t.within.ss = ss_w;
  t.within.df = df_w;
  t.within.ms = ss_w / df_w;
  t.familiarity = effect_row(ss_a, t.within.ms, df_w);
  t.explanation = effect_row(ss_b, t.within.ms, df_w);
  t.interaction = effect_row(ss_ab, t.within.ms, df_w);
  t.ss_total = ss_t;
  t.df_total = static_cast<int>(total_n) - 1;
  return t;
}

}  // namespace panelist

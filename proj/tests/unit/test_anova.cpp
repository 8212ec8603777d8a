#include <gtest/gtest.h>

#include <random>

#include "panelist/anova.hpp"
#include "panelist/error.hpp"
#include "support/fixtures.hpp"
#include "support/rational_anova.hpp"

using namespace panelist;

namespace {

CellScores worked_example() { return {{{1, 3}, {2, 4}, {5, 7}, {6, 8}}}; }

}  // namespace

TEST(Anova, WorkedExample) {
  const auto t = two_way_anova(worked_example());
  EXPECT_DOUBLE_EQ(t.familiarity.ss, 32);
  EXPECT_DOUBLE_EQ(t.explanation.ss, 2);
  EXPECT_NEAR(t.interaction.ss, 0, 1e-12);
  EXPECT_DOUBLE_EQ(t.within.ss, 8);
  EXPECT_DOUBLE_EQ(*t.familiarity.f, 16);
  EXPECT_DOUBLE_EQ(*t.explanation.f, 1);
  EXPECT_NEAR(*t.interaction.f, 0, 1e-12);
  EXPECT_EQ(t.familiarity.df, 1);
  EXPECT_EQ(t.within.df, 4);
  EXPECT_EQ(t.df_total, 7);
  EXPECT_DOUBLE_EQ(t.ss_total, 42);
  EXPECT_NEAR(*t.familiarity.p, 1 - 0.9838699100999074, 1e-10);
  EXPECT_NEAR(*t.interaction.p, 1.0, 1e-12);
}

TEST(Anova, WorkedExampleDirections) {
  const auto t = two_way_anova(worked_example());
  // Low cells hold the larger values, counterfactual cells exceed causal ones.
  EXPECT_LT(t.contrast(Effect::Familiarity), 0);
  EXPECT_GT(t.contrast(Effect::Explanation), 0);
  EXPECT_NEAR(t.contrast(Effect::Interaction), 0, 1e-12);
}

TEST(Anova, MatchesExactRationalOracle) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size(2, 10);
  std::uniform_int_distribution<int> eighths(0, 40);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = size(rng);
    CellScores cells;
    for (auto& c : cells) {
      for (int i = 0; i < n; ++i) c.push_back(eighths(rng) / 8.0);
    }
    const auto exact = oracle::rational_anova(cells);
    if (!exact.f_a) {
      EXPECT_THROW(two_way_anova(cells), StatsError);
      continue;
    }
    const auto t = two_way_anova(cells);
    const double floor = 1e-9 * std::max(1.0, oracle::to_double(exact.ss_total));
    EXPECT_TRUE(oracle::close_rel(t.familiarity.ss, exact.ss_a, 1e-9, floor));
    EXPECT_TRUE(oracle::close_rel(t.explanation.ss, exact.ss_b, 1e-9, floor));
    EXPECT_TRUE(oracle::close_rel(t.interaction.ss, exact.ss_ab, 1e-9, floor));
    EXPECT_TRUE(oracle::close_rel(t.within.ss, exact.ss_within, 1e-9, floor));
    const double ffloor = 1e-9 * std::max(1.0, oracle::to_double(*exact.f_a + *exact.f_b + *exact.f_ab));
    EXPECT_TRUE(oracle::close_rel(*t.familiarity.f, *exact.f_a, 1e-9, ffloor));
    EXPECT_TRUE(oracle::close_rel(*t.explanation.f, *exact.f_b, 1e-9, ffloor));
    EXPECT_TRUE(oracle::close_rel(*t.interaction.f, *exact.f_ab, 1e-9, ffloor));
    EXPECT_EQ(t.within.df, exact.df_within);
  }
}

TEST(Anova, EqualCellMeansGiveZeroF) {
  const CellScores cells = {{{1, 3}, {3, 1}, {0, 4}, {2, 2}}};
  const auto t = two_way_anova(cells);
  for (auto e : kAllEffects) {
    EXPECT_NEAR(*t.effect(e).f, 0.0, 1e-12);
    EXPECT_NEAR(*t.effect(e).p, 1.0, 1e-12);
  }
}

TEST(Anova, Errors) {
  EXPECT_THROW(two_way_anova({{{1, 2}, {1, 2}, {1, 2}, {1}}}), StatsError);
  EXPECT_THROW(two_way_anova({{{1}, {2}, {3}, {4}}}), StatsError);
  EXPECT_THROW(two_way_anova({{{2, 2}, {2, 2}, {2, 2}, {2, 2}}}), StatsError);
  // No within-cell spread, even if the cell means differ.
  EXPECT_THROW(two_way_anova({{{1, 1}, {2, 2}, {3, 3}, {4, 4}}}), StatsError);
}

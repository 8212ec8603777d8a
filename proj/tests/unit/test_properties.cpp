// Randomized invariants. Each property runs over a fixed-seed generator so
// failures reproduce.

#include <gtest/gtest.h>

#include <random>

#include "panelist/analysis.hpp"
#include "panelist/anova.hpp"
#include "panelist/codec.hpp"
#include "panelist/distributions.hpp"
#include "panelist/error.hpp"
#include "panelist/session.hpp"
#include "panelist/study.hpp"
#include "support/fixtures.hpp"

using namespace panelist;

namespace {

constexpr int kTrials = 300;

CellScores swap_factors(const CellScores& c) {
  // (A, B) -> (B, A): cells [A1B2] and [A2B1] trade places.
  return {c[0], c[2], c[1], c[3]};
}

CellScores affine(const CellScores& c, double a, double b) {
  CellScores out = c;
  for (auto& cell : out) {
    for (auto& v : cell) v = a * v + b;
  }
  return out;
}

bool has_variance(const CellScores& c) {
  for (const auto& cell : c) {
    for (double v : cell) {
      if (v != cell[0]) return true;
    }
  }
  return false;
}

std::string random_likert_answer(std::mt19937_64& rng, LikertScale scale, int code) {
  static const std::array<std::string, 6> wrappers = {"{}", "{}.", "\"{}\"", "  {}\n", "'{}'", "{}!"};
  std::string label(likert_label(scale, code));
  if (rng() % 2) {
    for (auto& ch : label) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  }
  std::string w = wrappers[rng() % wrappers.size()];
  return w.replace(w.find("{}"), 2, label);
}

}  // namespace

TEST(AnovaProperty, SumsOfSquaresAreAdditive) {
  std::mt19937_64 rng(101);
  for (int t = 0; t < kTrials; ++t) {
    const auto cells = fixtures::random_cells(rng, 2 + static_cast<int>(rng() % 12), t % 2 == 0);
    if (!has_variance(cells)) continue;
    AnovaTable a;
    try {
      a = two_way_anova(cells);
    } catch (const StatsError&) {
      continue;
    }
    const double parts = a.familiarity.ss + a.explanation.ss + a.interaction.ss + a.within.ss;
    EXPECT_NEAR(parts, a.ss_total, 1e-9 * std::max(1.0, a.ss_total)) << "trial " << t;
    EXPECT_EQ(a.familiarity.df + a.explanation.df + a.interaction.df + a.within.df, a.df_total);
    for (auto e : kAllEffects) {
      EXPECT_GE(*a.effect(e).f, 0.0);
      EXPECT_GE(*a.effect(e).p, 0.0);
      EXPECT_LE(*a.effect(e).p, 1.0);
    }
  }
}

TEST(AnovaProperty, SwappingFactorsSwapsMainEffects) {
  std::mt19937_64 rng(202);
  for (int t = 0; t < kTrials; ++t) {
    const auto cells = fixtures::random_cells(rng, 2 + static_cast<int>(rng() % 8), false);
    const auto a = two_way_anova(cells);
    const auto b = two_way_anova(swap_factors(cells));
    const double tol = 1e-9 * std::max(1.0, a.ss_total);
    EXPECT_NEAR(a.familiarity.ss, b.explanation.ss, tol);
    EXPECT_NEAR(a.explanation.ss, b.familiarity.ss, tol);
    EXPECT_NEAR(a.interaction.ss, b.interaction.ss, tol);
    EXPECT_NEAR(a.within.ss, b.within.ss, tol);
    // High is the first familiarity level but Counterfactual the second
    // explanation level, so the swapped main-effect contrast changes sign.
    EXPECT_NEAR(a.contrast(Effect::Familiarity), -b.contrast(Effect::Explanation), 1e-9);
    EXPECT_NEAR(a.contrast(Effect::Interaction), b.contrast(Effect::Interaction), 1e-9);
  }
}

TEST(AnovaProperty, AffineInvariance) {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> scale(0.25, 4.0);
  std::uniform_real_distribution<double> shift(-10.0, 10.0);
  for (int t = 0; t < kTrials; ++t) {
    const auto cells = fixtures::random_cells(rng, 3 + static_cast<int>(rng() % 8), false);
    const double a = (rng() % 2 ? 1.0 : -1.0) * scale(rng);
    const double b = shift(rng);
    const auto x = two_way_anova(cells);
    const auto y = two_way_anova(affine(cells, a, b));
    for (auto e : kAllEffects) {
      const double fx = *x.effect(e).f;
      const double fy = *y.effect(e).f;
      EXPECT_NEAR(fx, fy, 1e-7 * std::max(1.0, fx)) << "trial " << t;
      const double cx = x.contrast(e);
      const double cy = y.contrast(e);
      if (std::abs(cx) > 1e-9) {
        EXPECT_EQ(cx > 0, a > 0 ? cy > 0 : cy < 0) << "trial " << t;
      }
    }
  }
}

TEST(FdistProperty, CdfIsMonotoneAndBounded) {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> xs(0.0, 30.0);
  for (int t = 0; t < kTrials; ++t) {
    const double d1 = 1 + static_cast<double>(rng() % 10);
    const double d2 = 1 + static_cast<double>(rng() % 200);
    double x0 = xs(rng);
    double x1 = xs(rng);
    if (x0 > x1) std::swap(x0, x1);
    const double c0 = f_cdf(x0, d1, d2);
    const double c1 = f_cdf(x1, d1, d2);
    EXPECT_LE(c0, c1 + 1e-15);
    EXPECT_GE(c0, 0.0);
    EXPECT_LE(c1, 1.0);
    EXPECT_NEAR(c1 + f_sf(x1, d1, d2), 1.0, 1e-12);
  }
}

TEST(ConcordanceProperty, AnyOutcomeSetIsFullyConcordantWithItself) {
  std::mt19937_64 rng(505);
  for (int t = 0; t < kTrials; ++t) {
    std::vector<EffectOutcome> outs;
    std::array<std::array<double, kConditionCount>, 3> means{};
    for (auto m : kAllMeasures) {
      for (auto e : kAllEffects) {
        EffectOutcome o;
        o.measure = m;
        o.effect = e;
        o.determined = true;
        o.significant = rng() % 2;
        o.direction = o.significant ? (rng() % 2 ? Sign::Positive : Sign::Negative) : Sign::None;
        outs.push_back(o);
      }
    }
    EXPECT_EQ(concordance(outs, as_reference(outs, means)).concordant_count, 9);

    // Flipping one significance costs exactly one.
    auto flipped = outs;
    auto& f = flipped[rng() % 9];
    f.significant = !f.significant;
    f.direction = f.significant ? Sign::Positive : Sign::None;
    EXPECT_EQ(concordance(flipped, as_reference(outs, means)).concordant_count, 8);
  }
}

TEST(CodecProperty, ParseRendersBack) {
  std::mt19937_64 rng(606);
  for (int t = 0; t < kTrials; ++t) {
    const auto scale = rng() % 2 ? LikertScale::Agreement : LikertScale::Confidence;
    const int code = 1 + static_cast<int>(rng() % 5);
    const auto text = random_likert_answer(rng, scale, code);
    const auto p = parse_likert(text, scale);
    ASSERT_TRUE(p) << text;
    EXPECT_EQ(*p.value, code) << text;
    EXPECT_EQ(*parse_likert(likert_label(scale, *p.value), scale).value, code);

    const auto dom = rng() % 2 ? FamiliarityDomain::High : FamiliarityDomain::Low;
    const auto label = labels_for(dom)[rng() % 2];
    const auto q = parse_prediction(label_text(label), dom);
    ASSERT_TRUE(q);
    EXPECT_EQ(*q.value, label);
  }
}

TEST(SerializationProperty, CasesAndReferenceRoundTrip) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto d = fixtures::make_design(seed, 4 * static_cast<int>(seed), 1 + static_cast<int>(seed % 3));
    const auto text = serialize_cases(d);
    const auto back = parse_cases(text);
    EXPECT_EQ(back, d);
    EXPECT_EQ(serialize_cases(back), text);
  }
  std::mt19937_64 rng(707);
  for (int t = 0; t < 50; ++t) {
    std::array<std::array<int, 3>, 3> codes{};
    for (auto& row : codes) {
      for (auto& c : row) c = static_cast<int>(rng() % 3) - 1;
    }
    const auto ref = fixtures::make_reference(codes);
    const auto text = serialize_human_reference(ref);
    const auto back = parse_human_reference(text);
    EXPECT_EQ(serialize_human_reference(back), text);
    EXPECT_EQ(back.effects, ref.effects);
  }
}

TEST(SerializationProperty, TrialLinesRoundTrip) {
  std::mt19937_64 rng(808);
  const std::array<std::string, 4> raw = {"Agree", "I think \"Safe\"\n", "\\ odd \t text", "é ü"};
  for (int t = 0; t < kTrials; ++t) {
    TrialRecord r;
    r.model_id = "m" + std::to_string(rng() % 3);
    r.mode = rng() % 2 ? MemoryMode::Isolation : MemoryMode::WithMemory;
    r.user_id = "u" + std::to_string(rng() % 100);
    r.run_id = static_cast<int>(rng() % 5);
    r.condition = kAllConditions[rng() % 4];
    r.task = static_cast<Task>(rng() % 3);
    r.position = static_cast<int>(rng() % 48);
    r.case_id = "case-" + std::to_string(rng() % 16);
    r.raw_response = raw[rng() % raw.size()];
    r.parse_status = static_cast<ParseStatus>(rng() % 3);
    if (r.parse_status == ParseStatus::Ok) {
      if (r.task == Task::Prediction) {
        r.label = labels_for(r.condition.familiarity)[rng() % 2];
        r.correct = static_cast<int>(rng() % 2);
      } else {
        r.code = 1 + static_cast<int>(rng() % 5);
      }
    }
    r.attempts = 1 + static_cast<int>(rng() % 2);
    r.prompt_digest = std::to_string(rng());
    r.served_from_cache = rng() % 2;
    r.timestamp = "2024-06-01T00:00:00Z";
    const auto line = to_json_line(r);
    EXPECT_EQ(parse_trial_line(line), r) << line;
    EXPECT_EQ(to_json_line(parse_trial_line(line)), line);
  }
}

TEST(PermutationProperty, EveryPermutationIsABijection) {
  std::mt19937_64 seeds(909);
  for (int t = 0; t < kTrials; ++t) {
    std::mt19937_64 e(seeds());
    const std::size_t n = 1 + seeds() % 40;
    auto p = seeded_permutation(n, e);
    std::sort(p.begin(), p.end());
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(p[i], i);
  }
}

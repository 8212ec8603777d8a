#include "panelist/analysis.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "panelist/error.hpp"

namespace panelist {

namespace {

std::optional<Measure> measure_of(Task t) {
  switch (t) {
    case Task::Helpfulness: return Measure::Helpfulness;
    case Task::Prediction: return Measure::Accuracy;
    case Task::Confidence: return Measure::Confidence;
  }
  return std::nullopt;
}

std::optional<double> value_of(const TrialRecord& r) {
  if (r.missing()) return std::nullopt;
  if (r.task == Task::Prediction) {
    if (!r.correct) return std::nullopt;
    return static_cast<double>(*r.correct);
  }
  if (!r.code) return std::nullopt;
  return static_cast<double>(*r.code);
}

struct Running {
  double sum = 0.0;
  std::size_t n = 0;
  void add(double v) {
    sum += v;
    ++n;
  }
  double mean() const { return sum / static_cast<double>(n); }
};

std::string run_label(const std::string& user, int run) { return user + "/r" + std::to_string(run); }

}  // namespace

std::string_view to_string(AggregationMode m) {
  return m == AggregationMode::Aggregated ? "aggregated" : "per_run";
}

AggregationResult aggregate(std::span<const TrialRecord> trials, AggregationMode mode) {
  AggregationResult out;

  using RunKey = std::pair<std::string, int>;
  std::map<RunKey, std::vector<const TrialRecord*>> runs;
  std::map<std::string, Condition> user_condition;
  for (const auto& r : trials) {
    runs[{r.user_id, r.run_id}].push_back(&r);
    user_condition.emplace(r.user_id, r.condition);
  }

  // Run exclusion on missing answers.
  std::set<RunKey> excluded;
  for (const auto& [key, recs] : runs) {
    for (auto t : {Task::Helpfulness, Task::Prediction, Task::Confidence}) {
      std::size_t total = 0;
      std::size_t missing = 0;
      for (const auto* r : recs) {
        if (r->task != t) continue;
        ++total;
        if (!value_of(*r)) ++missing;
      }
      if (total == 0 ||
          static_cast<double>(missing) > kMaxMissingFraction * static_cast<double>(total)) {
        excluded.insert(key);
        out.exclusions.push_back({run_label(key.first, key.second),
                                  std::string(to_string(t)) + ": " + std::to_string(missing) +
                                      " of " + std::to_string(total) + " answers missing"});
        break;
      }
    }
  }

  // participant -> measure -> question -> running mean over runs
  using QuestionMeans = std::map<std::string, Running>;
  std::map<std::string, std::array<QuestionMeans, 3>> per_participant;
  std::map<std::string, Condition> participant_condition;
  std::array<std::array<std::map<std::string, Running>, kConditionCount>, 3> case_acc;

  for (const auto& [key, recs] : runs) {
    if (excluded.count(key)) continue;
    const auto pid = mode == AggregationMode::Aggregated ? key.first : run_label(key.first, key.second);
    participant_condition.emplace(pid, user_condition.at(key.first));
    auto& slot = per_participant[pid];
    for (const auto* r : recs) {
      const auto v = value_of(*r);
      if (!v) continue;
      const auto m = static_cast<std::size_t>(*measure_of(r->task));
      slot[m][r->case_id].add(*v);
      case_acc[m][condition_index(r->condition)][r->case_id].add(*v);
    }
  }

  std::set<std::string> users_with_runs;
  for (const auto& [key, _] : runs) users_with_runs.insert(key.first);
  if (mode == AggregationMode::Aggregated) {
    for (const auto& u : users_with_runs) {
      if (!per_participant.count(u)) {
        out.exclusions.push_back({u, "every run excluded"});
      }
    }
  }

  for (auto m : kAllMeasures) {
    const auto mi = static_cast<std::size_t>(m);
    for (const auto& [pid, measures] : per_participant) {
      const auto& questions = measures[mi];
      if (questions.empty()) {
        out.exclusions.push_back({pid, std::string(to_string(m)) + ": every item missing"});
        continue;
      }
      Running overall;
      for (const auto& [_, q] : questions) overall.add(q.mean());
      out.scores.push_back({pid, participant_condition.at(pid), m, overall.mean()});
    }
    for (std::size_t c = 0; c < kConditionCount; ++c) {
      for (const auto& [id, acc] : case_acc[mi][c]) out.per_case_means[mi][c][id] = acc.mean();
    }
  }
  return out;
}

CellScores cells_for(std::span<const ParticipantScore> scores, Measure measure) {
  CellScores cells;
  for (const auto& s : scores) {
    if (s.measure == measure) cells[condition_index(s.condition)].push_back(s.value);
  }
  return cells;
}

MeasureAnalysis analyze_measure(std::span<const ParticipantScore> scores, Measure measure,
                                double alpha) {
  MeasureAnalysis a;
  a.measure = measure;
  const auto cells = cells_for(scores, measure);
  for (std::size_t i = 0; i < kConditionCount; ++i) {
    a.cell_sizes[i] = cells[i].size();
    double sum = 0.0;
    for (double v : cells[i]) sum += v;
    a.cell_means[i] = cells[i].empty() ? 0.0 : sum / static_cast<double>(cells[i].size());
  }
  a.normality = normality_check(cells, alpha);
  try {
    a.anova = two_way_anova(cells);
  } catch (const StatsError& e) {
    a.error = e.what();
  }
  for (auto e : kAllEffects) {
    auto& o = a.outcomes[static_cast<std::size_t>(e)];
    o.measure = measure;
    o.effect = e;
    o.normality_flag = a.normality.flag;
    if (!a.anova) continue;
    const auto& row = a.anova->effect(e);
    o.determined = true;
    o.f = row.f;
    o.p = row.p;
    o.significant = *row.p < alpha;
    if (o.significant) {
      const double c = a.anova->contrast(e);
      o.direction = c > 0 ? Sign::Positive : c < 0 ? Sign::Negative : Sign::None;
    }
  }
  return a;
}

std::string_view to_string(MseGranularity g) {
  return g == MseGranularity::PerCondition ? "per_condition" : "per_case";
}

std::optional<MseGranularity> parse_mse_granularity(std::string_view s) {
  if (s == "per_condition") return MseGranularity::PerCondition;
  if (s == "per_case") return MseGranularity::PerCase;
  return std::nullopt;
}

std::vector<MseEntry> mse_vs_human(
    const std::array<std::array<double, kConditionCount>, 3>& llm_means,
    const std::array<std::array<CaseMeans, kConditionCount>, 3>& llm_case_means,
    const HumanReference& human, MseGranularity granularity) {
  if (granularity == MseGranularity::PerCase && !human.per_case_means) {
    throw SchemaError(
        "human reference has no per-case means; use per_condition MSE granularity instead");
  }
  std::vector<MseEntry> out;
  for (auto m : kAllMeasures) {
    const auto mi = static_cast<std::size_t>(m);
    for (const auto& c : kAllConditions) {
      const auto ci = condition_index(c);
      MseEntry e{m, c, 0.0, llm_means[mi][ci], human.mean(m, c), 0};
      if (granularity == MseGranularity::PerCondition) {
        const double d = e.llm_mean - e.human_mean;
        e.mse = d * d;
      } else {
        const auto& hcases = (*human.per_case_means)[mi][ci];
        if (hcases.empty()) {
          throw SchemaError("human reference has no per-case means for (" +
                            std::string(to_string(m)) + ", " + condition_key(c) +
                            "); use per_condition MSE granularity instead");
        }
        double sum = 0.0;
        for (const auto& [id, hv] : hcases) {
          const auto it = llm_case_means[mi][ci].find(id);
          if (it == llm_case_means[mi][ci].end()) {
            throw SchemaError("no LLM answers for case '" + id + "' in (" +
                              std::string(to_string(m)) + ", " + condition_key(c) + ")");
          }
          sum += (it->second - hv) * (it->second - hv);
        }
        e.cases = hcases.size();
        e.mse = sum / static_cast<double>(hcases.size());
      }
      out.push_back(e);
    }
  }
  return out;
}

ConcordanceReport concordance(std::span<const EffectOutcome> llm, const HumanReference& human) {
  ConcordanceReport rep;
  std::array<std::array<const EffectOutcome*, 3>, 3> by{};
  for (const auto& o : llm) by[static_cast<std::size_t>(o.measure)][static_cast<std::size_t>(o.effect)] = &o;
  std::size_t k = 0;
  for (auto m : kAllMeasures) {
    for (auto e : kAllEffects) {
      const auto* o = by[static_cast<std::size_t>(m)][static_cast<std::size_t>(e)];
      if (!o) {
        throw SchemaError("LLM outcomes lack the (" + std::string(to_string(m)) + ", " +
                          std::string(to_string(e)) + ") entry");
      }
      ConcordanceEntry& c = rep.entries[k++];
      c.measure = m;
      c.effect = e;
      c.llm_determined = o->determined;
      c.llm = {o->significant, o->significant ? o->direction : Sign::None};
      c.human = human.effect(m, e);
      c.concordant = o->determined && c.llm.significant == c.human.significant &&
                     (!c.human.significant || c.llm.direction == c.human.direction);
      if (c.concordant) ++rep.concordant_count;
    }
  }
  return rep;
}

HumanReference as_reference(std::span<const EffectOutcome> outcomes,
                            const std::array<std::array<double, kConditionCount>, 3>& means) {
  HumanReference ref;
  ref.means = means;
  for (const auto& o : outcomes) {
    ref.effects[static_cast<std::size_t>(o.measure)][static_cast<std::size_t>(o.effect)] = {
        o.significant, o.significant ? o.direction : Sign::None};
  }
  return ref;
}

}  // namespace panelist

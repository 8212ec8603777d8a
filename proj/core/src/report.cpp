#include "panelist/report.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "panelist/config.hpp"
#include "panelist/digest.hpp"
#include "panelist/error.hpp"

namespace panelist {

namespace {

using ojson = nlohmann::ordered_json;

ojson opt(const std::optional<double>& v) { return v ? ojson(*v) : ojson(); }

ojson row_json(const AnovaRow& r, bool effect) {
  ojson j;
  j["ss"] = r.ss;
  j["df"] = r.df;
  j["ms"] = r.ms;
  if (effect) {
    j["f"] = opt(r.f);
    j["p"] = opt(r.p);
  }
  return j;
}

std::string outcome_code(const ConcordanceEntry& e) {
  if (!e.llm_determined) return "undetermined";
  if (!e.llm.significant) return "ns";
  return std::string("sig") + std::string(to_string(e.llm.direction));
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

}  // namespace

double ModelReport::parse_rate() const {
  return records == 0 ? 0.0 : static_cast<double>(parsed) / static_cast<double>(records);
}

ModelReport build_report(std::span<const TrialRecord> trials, const HumanReference& reference,
                         std::string reference_sha256, AggregationMode aggregation,
                         MseGranularity granularity) {
  if (trials.empty()) throw SchemaError("trial log holds no records");
  ModelReport r;
  r.model_id = trials.front().model_id;
  r.mode = trials.front().mode;
  r.aggregation = aggregation;
  r.granularity = granularity;
  r.reference_sha256 = std::move(reference_sha256);
  std::set<std::pair<std::string, int>> runs;
  for (const auto& t : trials) {
    if (t.model_id != r.model_id || t.mode != r.mode) {
      throw SchemaError("trial log mixes settings: '" + r.model_id + "'/" +
                        std::string(to_string(r.mode)) + " and '" + t.model_id + "'/" +
                        std::string(to_string(t.mode)));
    }
    ++r.records;
    if (!t.missing()) ++r.parsed;
    runs.emplace(t.user_id, t.run_id);
  }
  r.runs = runs.size();

  const auto agg = aggregate(trials, aggregation);
  r.exclusions = agg.exclusions;
  std::vector<EffectOutcome> outcomes;
  std::array<std::array<double, kConditionCount>, 3> means{};
  for (auto m : kAllMeasures) {
    const auto mi = static_cast<std::size_t>(m);
    r.measures[mi] = analyze_measure(agg.scores, m);
    means[mi] = r.measures[mi].cell_means;
    for (const auto& o : r.measures[mi].outcomes) outcomes.push_back(o);
  }
  r.concordance = concordance(outcomes, reference);
  r.mse = mse_vs_human(means, agg.per_case_means, reference, granularity);
  return r;
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string anova_json(const ModelReport& r) {
  ojson j;
  j["model"] = r.model_id;
  j["memory_mode"] = to_string(r.mode);
  j["aggregation"] = to_string(r.aggregation);
  j["alpha"] = kAlpha;
  auto measures = ojson::array();
  for (const auto& m : r.measures) {
    ojson mj;
    mj["measure"] = to_string(m.measure);
    ojson sizes;
    ojson cmeans;
    for (const auto& c : kAllConditions) {
      sizes[condition_key(c)] = m.cell_sizes[condition_index(c)];
      cmeans[condition_key(c)] = m.cell_means[condition_index(c)];
    }
    mj["cell_sizes"] = std::move(sizes);
    mj["cell_means"] = std::move(cmeans);
    if (m.anova) {
      ojson a;
      a["familiarity"] = row_json(m.anova->familiarity, true);
      a["explanation"] = row_json(m.anova->explanation, true);
      a["interaction"] = row_json(m.anova->interaction, true);
      a["within"] = row_json(m.anova->within, false);
      a["total"] = {{"ss", m.anova->ss_total}, {"df", m.anova->df_total}};
      a["grand_mean"] = m.anova->grand_mean;
      mj["anova"] = std::move(a);
    } else {
      mj["anova"] = nullptr;
      mj["error"] = m.error;
    }
    ojson norm;
    norm["flag"] = m.normality.flag;
    ojson cells;
    for (const auto& c : kAllConditions) {
      const auto& cn = m.normality.cells[condition_index(c)];
      ojson cj;
      cj["n"] = cn.n;
      cj["w"] = cn.test ? ojson(cn.test->w) : ojson();
      cj["p"] = cn.test ? ojson(cn.test->p) : ojson();
      cj["pass"] = cn.pass;
      if (!cn.note.empty()) cj["note"] = cn.note;
      cells[condition_key(c)] = std::move(cj);
    }
    norm["cells"] = std::move(cells);
    mj["normality"] = std::move(norm);
    ojson outs;
    for (const auto& o : m.outcomes) {
      outs[std::string(to_string(o.effect))] = {{"determined", o.determined},
                                                {"significant", o.significant},
                                                {"direction", to_string(o.direction)}};
    }
    mj["outcomes"] = std::move(outs);
    measures.push_back(std::move(mj));
  }
  j["measures"] = std::move(measures);
  return j.dump(2) + "\n";
}

std::string concordance_csv(const ModelReport& r) {
  std::ostringstream os;
  os << "measure,effect,llm_significant,llm_direction,llm_f,llm_p,human_significant,"
        "human_direction,concordant\n";
  for (const auto& e : r.concordance.entries) {
    const auto& o = r.measures[static_cast<std::size_t>(e.measure)].outcomes[static_cast<std::size_t>(e.effect)];
    os << to_string(e.measure) << ',' << to_string(e.effect) << ',';
    os << (e.llm_determined ? yes_no(e.llm.significant) : "undetermined") << ','
       << to_string(e.llm.direction) << ',' << (o.f ? format_number(*o.f) : "") << ','
       << (o.p ? format_number(*o.p) : "") << ',' << yes_no(e.human.significant) << ','
       << to_string(e.human.direction) << ',' << yes_no(e.concordant) << '\n';
  }
  os << "summary,all,,,,,,," << r.concordance.concordant_count << "/9\n";
  return os.str();
}

std::string mse_csv(const ModelReport& r) {
  std::ostringstream os;
  os << "measure,condition,granularity,llm_mean,human_mean,mse,cases\n";
  for (const auto& e : r.mse) {
    os << to_string(e.measure) << ',' << condition_key(e.condition) << ','
       << to_string(r.granularity) << ',' << format_number(e.llm_mean) << ','
       << format_number(e.human_mean) << ',' << format_number(e.mse) << ',' << e.cases << '\n';
  }
  return os.str();
}

std::string report_text(const ModelReport& r) {
  std::ostringstream os;
  os << "Model: " << r.model_id << "\n";
  os << "Setting: " << to_string(r.mode) << ", " << to_string(r.aggregation) << "\n";
  os << "Trials: " << r.records << " records over " << r.runs << " runs, " << r.parsed
     << " parsed (" << format_number(100.0 * r.parse_rate()) << "%)\n";
  os << "Concordance with human reference: " << r.concordance.concordant_count << "/9\n";

  for (const auto& m : r.measures) {
    os << "\n[" << to_string(m.measure) << "]\n";
    for (const auto& c : kAllConditions) {
      const auto ci = condition_index(c);
      os << "  " << condition_key(c) << ": mean " << format_number(m.cell_means[ci]) << " (n="
         << m.cell_sizes[ci] << ")\n";
    }
    if (!m.anova) os << "  ANOVA not computed: " << m.error << "\n";
    for (const auto& o : m.outcomes) {
      const auto& e = r.concordance.entries[static_cast<std::size_t>(o.measure) * 3 +
                                            static_cast<std::size_t>(o.effect)];
      os << "  " << to_string(o.effect) << ": ";
      if (o.determined) {
        os << "F=" << format_number(*o.f) << " p=" << format_number(*o.p) << " "
           << (o.significant ? "significant " + std::string(to_string(o.direction)) : "not significant");
      } else {
        os << "undetermined";
      }
      os << "; human " << (e.human.significant ? "significant " + std::string(to_string(e.human.direction)) : "not significant")
         << "; " << (e.concordant ? "concordant" : "not concordant") << "\n";
    }
    if (m.normality.flag) {
      os << "  Normality: ";
      bool first = true;
      for (const auto& c : kAllConditions) {
        const auto& cn = m.normality.cells[condition_index(c)];
        if (cn.pass) continue;
        if (!first) os << "; ";
        first = false;
        os << condition_key(c);
        if (cn.test) {
          os << " fails (W=" << format_number(cn.test->w) << ", p=" << format_number(cn.test->p) << ")";
        } else {
          os << " " << cn.note;
        }
      }
      os << ". Interpret with caution.\n";
    } else {
      os << "  Normality: all cells pass\n";
    }
  }

  os << "\nExclusions:";
  if (r.exclusions.empty()) {
    os << " none\n";
  } else {
    os << "\n";
    for (const auto& e : r.exclusions) os << "  " << e.participant_id << ": " << e.reason << "\n";
  }
  return os.str();
}

std::string summary_json(const ModelReport& r) {
  ojson j;
  j["model"] = r.model_id;
  j["memory_mode"] = to_string(r.mode);
  j["aggregation"] = to_string(r.aggregation);
  j["mse_granularity"] = to_string(r.granularity);
  j["reference_sha256"] = r.reference_sha256;
  j["records"] = r.records;
  j["parsed"] = r.parsed;
  j["runs"] = r.runs;
  j["excluded"] = r.exclusions.size();
  j["concordant"] = r.concordance.concordant_count;
  j["total"] = 9;
  auto entries = ojson::array();
  for (const auto& e : r.concordance.entries) {
    entries.push_back({{"measure", to_string(e.measure)},
                       {"effect", to_string(e.effect)},
                       {"concordant", e.concordant}});
  }
  j["entries"] = std::move(entries);
  return j.dump(2) + "\n";
}

std::string setting_slug(const ModelReport& r) {
  return file_safe(r.model_id) + "__" + std::string(to_string(r.mode)) + "__" +
         std::string(to_string(r.aggregation));
}

void write_report_set(const ModelReport& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "anova.json", anova_json(r));
  write_file_atomic(dir / "concordance.csv", concordance_csv(r));
  write_file_atomic(dir / "mse.csv", mse_csv(r));
  write_file_atomic(dir / "report.txt", report_text(r));
  write_file_atomic(dir / "summary.json", summary_json(r));
}

std::string concordance_grid_csv(std::span<const ModelReport> reports) {
  std::ostringstream os;
  os << "measure,effect,human";
  for (const auto& r : reports) {
    const auto slug = setting_slug(r);
    os << ',' << slug << ',' << slug << "_concordant";
  }
  os << '\n';
  for (std::size_t k = 0; k < 9; ++k) {
    const auto m = kAllMeasures[k / 3];
    const auto e = kAllEffects[k % 3];
    os << to_string(m) << ',' << to_string(e) << ',';
    if (!reports.empty()) {
      const auto& h = reports.front().concordance.entries[k].human;
      os << (h.significant ? "sig" + std::string(to_string(h.direction)) : "ns");
    }
    for (const auto& r : reports) {
      const auto& entry = r.concordance.entries[k];
      os << ',' << outcome_code(entry) << ',' << (entry.concordant ? 1 : 0);
    }
    os << '\n';
  }
  os << "total,all,";
  for (const auto& r : reports) os << ",," << r.concordance.concordant_count;
  os << '\n';
  return os.str();
}

SettingSummary parse_summary_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    SettingSummary s;
    s.model_id = j.at("model").get<std::string>();
    s.mode = j.at("memory_mode").get<std::string>();
    s.aggregation = j.at("aggregation").get<std::string>();
    s.reference_sha256 = j.at("reference_sha256").get<std::string>();
    s.concordant = j.at("concordant").get<int>();
    const auto& entries = j.at("entries");
    if (!entries.is_array() || entries.size() != 9) {
      throw SchemaError("summary must list 9 concordance entries");
    }
    for (std::size_t i = 0; i < 9; ++i) s.entries[i] = entries[i].at("concordant").get<bool>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed summary.json: ") + e.what());
  }
}

std::string settings_comparison_csv(std::span<const SettingSummary> settings) {
  std::ostringstream os;
  os << "model,memory_mode,aggregation,concordant,total\n";
  for (const auto& s : settings) {
    os << s.model_id << ',' << s.mode << ',' << s.aggregation << ',' << s.concordant << ",9\n";
  }
  return os.str();
}

std::vector<AggregationDelta> aggregation_deltas(std::span<const SettingSummary> settings) {
  std::map<std::pair<std::string, std::string>, std::pair<const SettingSummary*, const SettingSummary*>> pairs;
  for (const auto& s : settings) {
    auto& slot = pairs[{s.model_id, s.mode}];
    if (s.aggregation == to_string(AggregationMode::Aggregated)) {
      slot.first = &s;
    } else {
      slot.second = &s;
    }
  }
  std::vector<AggregationDelta> out;
  for (const auto& [key, p] : pairs) {
    if (p.first && p.second) out.push_back({key.first, key.second, p.first->concordant, p.second->concordant});
  }
  return out;
}

std::string aggregation_effect_csv(std::span<const AggregationDelta> deltas) {
  std::ostringstream os;
  os << "model,memory_mode,aggregated,per_run,delta\n";
  int improved = 0;
  for (const auto& d : deltas) {
    const int delta = d.aggregated - d.per_run;
    if (delta > 0) ++improved;
    os << d.model_id << ',' << d.mode << ',' << d.aggregated << ',' << d.per_run << ',' << delta << '\n';
  }
  os << "tally,,,,improved " << improved << " of " << deltas.size() << '\n';
  return os.str();
}

}  // namespace panelist

#include "panelist/commands.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "panelist/digest.hpp"
#include "panelist/error.hpp"
#include "panelist/http_client.hpp"
#include "panelist/mock_client.hpp"
#include "panelist/session.hpp"
#include "panelist/trial_log.hpp"

namespace fs = std::filesystem;

namespace panelist {

namespace {

using ojson = nlohmann::ordered_json;

constexpr const char* kManifest = "manifest.json";
constexpr const char* kMockTimestamp = "1970-01-01T00:00:00Z";

fs::path log_path(const fs::path& out, const std::string& model) {
  return out / ("trials-" + file_safe(model) + ".jsonl");
}

std::vector<TrialRecord> complete_sessions(std::vector<TrialRecord> records, const std::string& model,
                                           MemoryMode mode) {
  std::map<std::pair<std::string, int>, std::set<int>> positions;
  std::map<std::pair<std::string, int>, std::size_t> counts;
  for (const auto& r : records) {
    if (r.model_id != model || r.mode != mode) continue;
    positions[{r.user_id, r.run_id}].insert(r.position);
    ++counts[{r.user_id, r.run_id}];
  }
  std::vector<TrialRecord> kept;
  for (auto& r : records) {
    if (r.model_id != model || r.mode != mode) continue;
    const std::pair<std::string, int> key{r.user_id, r.run_id};
    if (positions[key].size() == kRecordsPerRun && counts[key] == kRecordsPerRun) {
      kept.push_back(std::move(r));
    }
  }
  return kept;
}

struct Effective {
  int users;
  int runs;
  std::uint64_t seed;
};

ojson manifest_head(const StudyConfig& config, const Effective& eff, const std::string& cases_sha,
                    const std::string& ref_sha, const std::optional<std::string>& mock) {
  ojson j;
  j["tool"] = "panelist";
  j["mock"] = mock ? ojson(*mock) : ojson();
  j["seed"] = eff.seed;
  j["n_llm_users"] = eff.users;
  j["runs_per_user"] = eff.runs;
  j["memory_mode"] = to_string(config.memory_mode);
  j["config"] = ojson::parse(config_snapshot(config));
  j["inputs"] = {{"cases", {{"file", config.cases_path.filename().string()}, {"sha256", cases_sha}}},
                 {"human_reference",
                  {{"file", config.reference_path.filename().string()}, {"sha256", ref_sha}}}};
  j["fingerprint"] = sha256_hex(j.dump());
  return j;
}

void check_previous_manifest(const fs::path& out, const std::string& fingerprint) {
  const auto path = out / kManifest;
  if (!fs::exists(path)) return;
  std::string previous;
  try {
    const auto j = nlohmann::json::parse(read_file(path));
    previous = j.at("fingerprint").get<std::string>();
  } catch (const std::exception&) {
    throw ConfigError("cannot read existing " + path.filename().string() + " in the output directory");
  }
  if (previous != fingerprint) {
    throw ConfigError(
        "the output directory holds a run with a different configuration; choose another --out");
  }
}

std::vector<fs::path> find_summaries(const fs::path& input) {
  std::vector<fs::path> found;
  if (fs::is_regular_file(input)) {
    found.push_back(input);
  } else if (fs::is_directory(input)) {
    if (fs::is_regular_file(input / "summary.json")) {
      found.push_back(input / "summary.json");
    } else {
      for (const auto& e : fs::recursive_directory_iterator(input)) {
        if (e.is_regular_file() && e.path().filename() == "summary.json") found.push_back(e.path());
      }
    }
  } else {
    throw ConfigError("no such report set: " + input.string());
  }
  std::sort(found.begin(), found.end());
  return found;
}

}  // namespace

RunOutcome cmd_run(const StudyConfig& config, const RunOptions& options) {
  const auto design = load_cases(config.cases_path);
  const auto reference = load_human_reference(config.reference_path);
  const Effective eff{config.n_llm_users.value_or(design.n_llm_users),
                      config.runs_per_user.value_or(design.runs_per_user),
                      config.seed.value_or(design.seed)};
  const auto users = make_llm_users(design, eff.users, eff.runs, eff.seed);
  if (config.models.empty()) throw ConfigError("no models configured; pass --model");
  {
    std::set<std::string> names;
    for (const auto& m : config.models) {
      if (!names.insert(file_safe(m.id)).second) {
        throw ConfigError("model ids collide after file-name sanitizing: '" + m.id + "'");
      }
    }
  }
  const PromptEngine engine(config.prompts);

  // Every client is built before anything is sent, so missing credentials
  // fail the command up front.
  std::vector<std::shared_ptr<ChatClient>> clients;
  if (options.client) {
    clients.assign(config.models.size(), options.client);
  } else if (options.mock) {
    auto policy = mock_policy_by_name(*options.mock, &reference, config.accuracy_oracle);
    auto mock = std::make_shared<ScriptedMockClient>(design, engine, std::move(policy));
    clients.assign(config.models.size(), mock);
  } else {
    const auto key = api_key_from_env();
    for (const auto& m : config.models) {
      HttpClientConfig hc;
      hc.base_url = m.base_url;
      hc.path = m.path;
      hc.api_key = key;
      hc.retry = m.retry;
      hc.max_concurrency = m.max_concurrency;
      clients.push_back(std::make_shared<HttpChatClient>(hc));
    }
  }
  for (const auto& m : config.models) {
    validate(GenerationParams{m.id, m.temperature, m.max_tokens, m.seed});
  }

  const bool deterministic = options.mock.has_value();
  std::function<std::string()> clock =
      deterministic ? std::function<std::string()>([] { return std::string(kMockTimestamp); })
                    : std::function<std::string()>(utc_now);

  const auto& out = config.output_dir;
  fs::create_directories(out);
  const auto cases_sha = sha256_hex(read_file(config.cases_path));
  const auto ref_sha = sha256_hex(read_file(config.reference_path));
  auto manifest = manifest_head(config, eff, cases_sha, ref_sha, options.mock);
  check_previous_manifest(out, manifest["fingerprint"].get<std::string>());
  manifest["complete"] = false;
  manifest["outputs"] = ojson::array();
  write_file_atomic(out / kManifest, manifest.dump(2) + "\n");

  RunOutcome outcome;
  outcome.manifest = out / kManifest;
  auto outputs = ojson::array();
  for (std::size_t i = 0; i < config.models.size(); ++i) {
    const auto& m = config.models[i];
    const auto path = log_path(out, m.id);
    auto resumed = complete_sessions(read_partial_trial_log(path), m.id, config.memory_mode);
    finalize_trial_log(path, resumed);
    outcome.resumed += resumed.size();
    if (options.progress) {
      *options.progress << "model " << m.id << ": " << users.size() << " users x " << eff.runs
                        << " runs";
      if (!resumed.empty()) *options.progress << ", " << resumed.size() / kRecordsPerRun << " sessions resumed";
      *options.progress << "\n";
    }

    // Mock answers never enter the response cache, so a mock run cannot
    // shadow real completions and reruns stay byte-identical.
    std::optional<ResponseCache> cache;
    if (!deterministic && !config.cache_dir.empty()) cache.emplace(config.cache_dir);
    CachedChatClient client(clients[i], std::move(cache), clock);

    StudyRunOptions ro;
    ro.session.mode = config.memory_mode;
    ro.session.params = GenerationParams{m.id, m.temperature, m.max_tokens, m.seed};
    ro.session.oracle = config.accuracy_oracle;
    ro.session.clock = clock;
    ro.concurrency = config.concurrency;
    ro.resume_from = std::move(resumed);
    std::vector<TrialRecord> records;
    {
      TrialLogWriter writer(path);
      ro.log = &writer;
      records = run_study(design, engine, users, ro, client);
    }
    finalize_trial_log(path, records);
    outcome.records += records.size();
    outcome.logs.push_back(path);
    outputs.push_back({{"model", m.id},
                       {"file", path.filename().string()},
                       {"records", records.size()},
                       {"sha256", sha256_hex(read_file(path))}});
  }
  manifest["complete"] = true;
  manifest["outputs"] = std::move(outputs);
  write_file_atomic(out / kManifest, manifest.dump(2) + "\n");
  return outcome;
}

AnalyzeOutcome cmd_analyze(const StudyConfig& config, std::span<const fs::path> logs) {
  std::vector<fs::path> inputs(logs.begin(), logs.end());
  if (inputs.empty()) {
    if (fs::is_directory(config.output_dir)) {
      for (const auto& e : fs::directory_iterator(config.output_dir)) {
        const auto name = e.path().filename().string();
        if (e.is_regular_file() && name.starts_with("trials-") && name.ends_with(".jsonl")) {
          inputs.push_back(e.path());
        }
      }
    }
    std::sort(inputs.begin(), inputs.end());
    if (inputs.empty()) {
      throw ConfigError("no trial logs (trials-*.jsonl) in " + config.output_dir.string());
    }
  }
  const auto reference = load_human_reference(config.reference_path);
  const auto ref_sha = sha256_hex(read_file(config.reference_path));

  AnalyzeOutcome outcome;
  const auto reports_dir = config.output_dir / "reports";
  std::set<std::string> slugs;
  for (const auto& log : inputs) {
    const auto records = read_trial_log(log);
    std::map<std::pair<std::string, int>, std::size_t> per_run;
    for (const auto& r : records) ++per_run[{r.user_id, r.run_id}];
    for (const auto& [key, n] : per_run) {
      if (n != kRecordsPerRun) {
        throw SchemaError(log.filename().string() + ": run " + key.first + "/r" +
                          std::to_string(key.second) + " has " + std::to_string(n) + " of " +
                          std::to_string(kRecordsPerRun) + " records; resume the run first");
      }
    }
    auto report = build_report(records, reference, ref_sha, config.aggregation, config.mse_granularity);
    const auto slug = setting_slug(report);
    if (!slugs.insert(slug).second) throw ConfigError("two logs describe the same setting " + slug);
    const auto dir = reports_dir / slug;
    write_report_set(report, dir);
    outcome.report_dirs.push_back(dir);
    outcome.reports.push_back(std::move(report));
  }
  if (outcome.reports.size() >= 2) {
    outcome.grid = reports_dir / "concordance-grid.csv";
    write_file_atomic(*outcome.grid, concordance_grid_csv(outcome.reports));
  }
  return outcome;
}

CompareOutcome cmd_compare(std::span<const fs::path> inputs, const fs::path& out_dir) {
  std::set<fs::path> files;
  for (const auto& in : inputs) {
    for (auto& f : find_summaries(in)) files.insert(fs::weakly_canonical(f));
  }
  CompareOutcome outcome;
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  for (const auto& f : files) {
    auto s = parse_summary_json(read_file(f));
    if (!seen.emplace(s.model_id, s.mode, s.aggregation).second) {
      throw ConfigError("setting " + s.model_id + "/" + s.mode + "/" + s.aggregation +
                        " appears in more than one report set");
    }
    outcome.settings.push_back(std::move(s));
  }
  if (outcome.settings.size() < 2) throw ConfigError("need at least two settings");
  for (const auto& s : outcome.settings) {
    if (s.reference_sha256 != outcome.settings.front().reference_sha256) {
      throw ConfigError("report sets were scored against different human reference files");
    }
  }
  std::sort(outcome.settings.begin(), outcome.settings.end(), [](const auto& a, const auto& b) {
    return std::tie(a.model_id, a.mode, a.aggregation) < std::tie(b.model_id, b.mode, b.aggregation);
  });

  fs::create_directories(out_dir);
  outcome.table = out_dir / "settings-comparison.csv";
  write_file_atomic(outcome.table, settings_comparison_csv(outcome.settings));
  const auto deltas = aggregation_deltas(outcome.settings);
  outcome.aggregation_table = out_dir / "aggregation-effect.csv";
  write_file_atomic(outcome.aggregation_table, aggregation_effect_csv(deltas));
  const auto improved = std::count_if(deltas.begin(), deltas.end(),
                                      [](const auto& d) { return d.aggregated > d.per_run; });
  outcome.tally = "aggregation raised concordance in " + std::to_string(improved) + " of " +
                  std::to_string(deltas.size()) + " settings";
  return outcome;
}

}  // namespace panelist

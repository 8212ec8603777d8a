// panelist: run simulated-participant studies, analyze them, compare settings.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "panelist/commands.hpp"
#include "panelist/error.hpp"

namespace fs = std::filesystem;

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> model;
  std::optional<std::string> mode;
  std::optional<std::string> aggregate;
  std::optional<int> users;
  std::optional<int> runs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> cache_dir;
  std::optional<std::string> out;
  std::optional<std::string> mock;
  std::optional<int> concurrency;
};

void add_study_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "Study config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--model", f.model, "Restrict to one model id");
  cmd->add_option("--mode", f.mode, "Memory mode")->check(CLI::IsMember({"memory", "isolation"}));
  cmd->add_option("--aggregate", f.aggregate, "Aggregate runs per LLM-user")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--users", f.users, "Number of LLM-users (multiple of 4)");
  cmd->add_option("--runs", f.runs, "Runs per LLM-user");
  cmd->add_option("--seed", f.seed, "Permutation seed");
  cmd->add_option("--cache-dir", f.cache_dir, "Response cache directory");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--concurrency", f.concurrency, "Sessions run in parallel");
}

panelist::StudyConfig resolve_config(const Flags& f) {
  auto config = panelist::load_config(f.config);
  panelist::ConfigOverrides o;
  o.model = f.model;
  if (f.mode) o.mode = panelist::parse_memory_mode(*f.mode);
  if (f.aggregate) {
    o.aggregation = *f.aggregate == "on" ? panelist::AggregationMode::Aggregated
                                         : panelist::AggregationMode::PerRun;
  }
  o.users = f.users;
  o.runs = f.runs;
  o.seed = f.seed;
  if (f.cache_dir) o.cache_dir = fs::path(*f.cache_dir);
  if (f.out) o.output_dir = fs::path(*f.out);
  o.concurrency = f.concurrency;
  panelist::apply_overrides(config, o, f.mock.has_value());
  return config;
}

int run_command(const Flags& f) {
  const auto config = resolve_config(f);
  panelist::RunOptions options;
  options.mock = f.mock;
  options.progress = &std::cerr;
  const auto outcome = panelist::cmd_run(config, options);
  for (const auto& log : outcome.logs) std::cout << log.string() << "\n";
  std::cout << outcome.manifest.string() << "\n";
  return 0;
}

int analyze_command(const Flags& f, const std::vector<std::string>& logs) {
  const auto config = resolve_config(f);
  std::vector<fs::path> paths(logs.begin(), logs.end());
  const auto outcome = panelist::cmd_analyze(config, paths);
  for (std::size_t i = 0; i < outcome.reports.size(); ++i) {
    const auto& r = outcome.reports[i];
    std::cout << r.model_id << " (" << panelist::to_string(r.mode) << ", "
              << panelist::to_string(r.aggregation) << "): " << r.concordance.concordant_count
              << "/9 -> " << outcome.report_dirs[i].string() << "\n";
  }
  if (outcome.grid) std::cout << outcome.grid->string() << "\n";
  return 0;
}

int compare_command(const std::vector<std::string>& inputs, const std::string& out) {
  std::vector<fs::path> paths(inputs.begin(), inputs.end());
  const auto outcome = panelist::cmd_compare(paths, out);
  for (const auto& s : outcome.settings) {
    std::cout << s.model_id << " " << s.mode << " " << s.aggregation << ": " << s.concordant << "/9\n";
  }
  std::cout << outcome.tally << "\n" << outcome.table.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LLM-as-participant replication of XAI user studies"};
  app.require_subcommand(1);

  Flags run_flags;
  auto* run = app.add_subcommand("run", "Run the study and write trial logs");
  add_study_flags(run, run_flags);
  run->add_option("--mock", run_flags.mock,
                  "Scripted mock policy instead of a provider "
                  "(always-agree, always-strongly-agree, hashed, case-keyed, engineered)");

  Flags analyze_flags;
  std::vector<std::string> logs;
  auto* analyze = app.add_subcommand("analyze", "Compute ANOVA, MSE and concordance reports");
  add_study_flags(analyze, analyze_flags);
  analyze->add_option("logs", logs, "Trial logs (default: trials-*.jsonl in the output directory)")
      ->check(CLI::ExistingFile);

  std::vector<std::string> report_sets;
  std::string compare_out = "comparison";
  auto* compare = app.add_subcommand("compare", "Tabulate concordance across settings");
  compare->add_option("reports", report_sets, "Report directories")->required();
  compare->add_option("--out", compare_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(run_flags);
    if (*analyze) return analyze_command(analyze_flags, logs);
    if (*compare) return compare_command(report_sets, compare_out);
  } catch (const panelist::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const panelist::SchemaError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 3;
  } catch (const panelist::TransportError& e) {
    std::cerr << "transport error: " << e.what() << "\n";
    return 4;
  } catch (const panelist::ProtocolError& e) {
    std::cerr << "protocol error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

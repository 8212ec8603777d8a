#include "support/fixtures.hpp"

#include <atomic>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>
#include <unistd.h>

namespace fs = std::filesystem;
using namespace panelist;

namespace fixtures {

namespace {

Case high_case(const std::string& id, int i) {
  Case c;
  c.id = id;
  c.domain = FamiliarityDomain::High;
  const int units = 1 + (i * 7) % 10;
  const int weight = 55 + (i * 13) % 50;
  c.features = {{"name", "Person " + std::to_string(i + 1)},
                {"weight", std::to_string(weight) + " kg"},
                {"units_of_alcohol", std::to_string(units)},
                {"duration", std::to_string(1 + i % 4) + " hours"},
                {"gender", i % 2 ? "Female" : "Male"},
                {"stomach_content", i % 3 ? "Full" : "Empty"}};
  c.truth_label = units * 80 > weight * 5 ? BinaryLabel::OverTheLimit : BinaryLabel::UnderTheLimit;
  return c;
}

Case low_case(const std::string& id, int i) {
  Case c;
  c.id = id;
  c.domain = FamiliarityDomain::Low;
  const int air = 1 + (i * 3) % 5;
  c.features = {{"chemical_name", "Compound " + std::to_string(i + 1)},
                {"occupational_exposure_limit", std::to_string(5 + (i * 11) % 100) + " ppm"},
                {"ph", std::to_string(2 + i % 10) + ".5"},
                {"exposure_duration", std::to_string(1 + i % 8) + " hours"},
                {"air_pollution_rating", std::to_string(air) + "/5"},
                {"pnec_rating", "0." + std::to_string(1 + i % 9) + " mg/L"}};
  c.truth_label = air >= 3 ? BinaryLabel::NotSafe : BinaryLabel::Safe;
  return c;
}

}  // namespace

StudyDesign make_design(std::uint64_t seed, int users, int runs) {
  StudyDesign d;
  d.seed = seed;
  d.n_llm_users = users;
  d.runs_per_user = runs;
  for (const auto& cond : kAllConditions) {
    ConditionCases cc;
    cc.condition = cond;
    const std::string prefix = condition_key(cond);
    const bool high = cond.familiarity == FamiliarityDomain::High;
    for (int i = 0; i < 16; ++i) {
      const auto id = prefix + "-t1-" + std::to_string(i);
      ExplainedCase ec;
      ec.item = high ? high_case(id, i) : low_case(id, i);
      ec.ai_prediction = i % 5 == 4 ? opposite(*ec.item.truth_label) : *ec.item.truth_label;
      ec.item.ai_prediction = ec.ai_prediction;
      ec.explanation_type = cond.explanation;
      ec.explanation_text = cond.explanation == ExplanationType::Causal
                                ? "The main reason is feature " + std::to_string(i % 6) + "."
                                : "Had feature " + std::to_string(i % 6) +
                                      " been different, the prediction would change.";
      cc.task1.push_back(std::move(ec));
    }
    for (int i = 0; i < 16; ++i) {
      auto c = high ? high_case(prefix + "-t2-" + std::to_string(i), i + 16)
                    : low_case(prefix + "-t2-" + std::to_string(i), i + 16);
      c.ai_prediction = i % 4 == 3 ? opposite(*c.truth_label) : *c.truth_label;
      cc.task2.push_back(std::move(c));
    }
    d.conditions.push_back(std::move(cc));
  }
  return d;
}

HumanReference make_reference(const std::array<std::array<int, 3>, 3>& codes) {
  HumanReference ref;
  for (std::size_t m = 0; m < 3; ++m) {
    for (std::size_t e = 0; e < 3; ++e) {
      const int c = codes[m][e];
      ref.effects[m][e] = {c != 0, c > 0 ? Sign::Positive : c < 0 ? Sign::Negative : Sign::None};
    }
    for (std::size_t c = 0; c < kConditionCount; ++c) {
      ref.means[m][c] = m == 1 ? 0.6 + 0.05 * static_cast<double>(c) : 3.0 + 0.25 * static_cast<double>(c);
    }
  }
  return ref;
}

HumanReference default_reference() { return make_reference({{{1, 1, 0}, {1, 0, 0}, {1, 0, -1}}}); }

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("panelist-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

fs::path write_study(const fs::path& dir, const StudyDesign& design, const HumanReference& reference,
                     const std::string& extra) {
  fs::create_directories(dir);
  std::ofstream(dir / "cases.json") << serialize_cases(design);
  std::ofstream(dir / "reference.json") << serialize_human_reference(reference);
  auto config = nlohmann::json::parse(R"({"cases": "cases.json", "human_reference": "reference.json",
                                          "models": [{"id": "mock-model"}], "output_dir": "out"})");
  config.merge_patch(nlohmann::json::parse(extra));
  const auto path = dir / "study.json";
  std::ofstream(path) << config.dump(2);
  return path;
}

CellScores random_cells(std::mt19937_64& rng, int n, bool integer_valued) {
  CellScores cells;
  std::uniform_int_distribution<int> likert(1, 5);
  std::normal_distribution<double> normal(3.0, 1.0);
  for (auto& cell : cells) {
    for (int i = 0; i < n; ++i) {
      cell.push_back(integer_valued ? likert(rng) : normal(rng));
    }
  }
  return cells;
}

std::vector<TrialRecord> synthetic_run(const std::string& user, Condition condition, int run,
                                       const std::function<std::optional<int>(Task, int)>& value) {
  std::vector<TrialRecord> out;
  const std::string prefix = condition_key(condition);
  auto push = [&](Task task, int k, const std::string& case_id) {
    TrialRecord r;
    r.model_id = "mock-model";
    r.user_id = user;
    r.run_id = run;
    r.condition = condition;
    r.task = task;
    r.position = static_cast<int>(out.size());
    r.case_id = case_id;
    r.timestamp = "T";
    const auto v = value(task, k);
    if (!v) {
      r.raw_response = "no idea";
      r.parse_status = ParseStatus::Unparseable;
      r.attempts = 2;
    } else if (task == Task::Prediction) {
      r.parse_status = ParseStatus::Ok;
      r.label = labels_for(condition.familiarity)[0];
      r.raw_response = std::string(label_text(*r.label));
      r.correct = *v;
    } else {
      r.parse_status = ParseStatus::Ok;
      r.code = *v;
      r.raw_response = std::to_string(*v);
    }
    out.push_back(std::move(r));
  };
  for (int k = 0; k < 16; ++k) push(Task::Helpfulness, k, prefix + "-t1-" + std::to_string(k));
  for (int k = 0; k < 16; ++k) {
    const auto id = prefix + "-t2-" + std::to_string(k);
    push(Task::Prediction, k, id);
    push(Task::Confidence, k, id);
  }
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace fixtures

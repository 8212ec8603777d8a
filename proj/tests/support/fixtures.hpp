#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "panelist/analysis.hpp"
#include "panelist/session.hpp"
#include "panelist/study.hpp"

namespace fixtures {

/// A valid design with 16 + 16 synthetic cases per condition. Predictions of
/// the AI system are wrong on every fifth task-1 case.
panelist::StudyDesign make_design(std::uint64_t seed = 7, int users = 40, int runs = 1);

/// Reference with the given (significant, direction) code per entry; codes are
/// 0 = not significant, +1 / -1 = significant with that direction.
panelist::HumanReference make_reference(const std::array<std::array<int, 3>, 3>& codes);

/// helpfulness: F+, E+, I ns; accuracy: F+ only; confidence: F+, E ns, I-.
panelist::HumanReference default_reference();

/// Creates a fresh directory under the system temp dir; removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Writes cases.json, reference.json and study.json into `dir`; returns the
/// study config path. `extra` is merged into the config object (JSON text).
std::filesystem::path write_study(const std::filesystem::path& dir,
                                  const panelist::StudyDesign& design,
                                  const panelist::HumanReference& reference,
                                  const std::string& extra = "{}");

/// Balanced cells of size n with values drawn from `rng`.
panelist::CellScores random_cells(std::mt19937_64& rng, int n, bool integer_valued);

/// The 48 records of one complete run. `value(task, k)` gives the code (Likert
/// 1..5, or 0/1 correctness for predictions) of the k-th item of that task;
/// nullopt marks the answer unparseable.
std::vector<panelist::TrialRecord> synthetic_run(
    const std::string& user, panelist::Condition condition, int run,
    const std::function<std::optional<int>(panelist::Task, int)>& value);

std::string slurp(const std::filesystem::path& p);

}  // namespace fixtures

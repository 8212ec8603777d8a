#include <gtest/gtest.h>

#include <fstream>

#include "panelist/error.hpp"
#include "panelist/trial_log.hpp"
#include "support/fixtures.hpp"

using namespace panelist;

namespace {

std::vector<TrialRecord> sample_records(int users, int per_user) {
  std::vector<TrialRecord> out;
  for (int u = 0; u < users; ++u) {
    for (int p = 0; p < per_user; ++p) {
      TrialRecord r;
      r.model_id = "m";
      r.user_id = "u000" + std::to_string(u);
      r.condition = kAllConditions[static_cast<std::size_t>(u % 4)];
      r.task = p < 16 ? Task::Helpfulness : (p % 2 == 0 ? Task::Prediction : Task::Confidence);
      r.position = p;
      r.case_id = "c" + std::to_string(p);
      r.raw_response = "Agree";
      r.parse_status = ParseStatus::Ok;
      r.code = 4;
      if (r.task == Task::Prediction) {
        r.code.reset();
        r.label = labels_for(r.condition.familiarity)[0];
        r.correct = 1;
      }
      r.timestamp = "T";
      out.push_back(r);
    }
  }
  return out;
}

void append_raw(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::app | std::ios::binary) << text;
}

}  // namespace

TEST(TrialLog, WriteThenReadRoundTrips) {
  fixtures::TempDir dir;
  const auto path = dir / "trials.jsonl";
  const auto records = sample_records(2, 5);
  {
    TrialLogWriter w(path);
    w.append(std::span(records).first(5));
    w.append(std::span(records).subspan(5));
  }
  EXPECT_EQ(read_trial_log(path), records);
}

TEST(TrialLog, FinalizeSortsIntoProtocolOrder) {
  fixtures::TempDir dir;
  const auto path = dir / "trials.jsonl";
  auto records = sample_records(3, 4);
  auto shuffled = records;
  std::reverse(shuffled.begin(), shuffled.end());
  finalize_trial_log(path, shuffled);
  EXPECT_EQ(read_trial_log(path), records);
  EXPECT_EQ(fixtures::slurp(path), serialize_trial_log(records));
  EXPECT_EQ(serialize_trial_log(shuffled), serialize_trial_log(records));
}

TEST(TrialLog, MalformedLineNamesFileAndLine) {
  fixtures::TempDir dir;
  const auto path = dir / "bad.jsonl";
  const auto records = sample_records(1, 2);
  append_raw(path, to_json_line(records[0]) + "\n{\"model\": 3}\n");
  try {
    read_trial_log(path);
    FAIL();
  } catch (const SchemaError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("bad.jsonl"), std::string::npos) << what;
    EXPECT_NE(what.find(":2"), std::string::npos) << what;
  }
}

TEST(TrialLog, MissingOrEmptyFileIsSchemaError) {
  fixtures::TempDir dir;
  EXPECT_THROW(read_trial_log(dir / "none.jsonl"), SchemaError);
  append_raw(dir / "empty.jsonl", "");
  EXPECT_THROW(read_trial_log(dir / "empty.jsonl"), SchemaError);
}

TEST(TrialLog, PartialReadDropsTornFinalLine) {
  fixtures::TempDir dir;
  const auto path = dir / "torn.jsonl";
  const auto records = sample_records(1, 3);
  const auto third = to_json_line(records[2]);
  append_raw(path, to_json_line(records[0]) + "\n" + to_json_line(records[1]) + "\n" +
                       third.substr(0, third.size() / 2));
  const auto got = read_partial_trial_log(path);
  ASSERT_EQ(got.size(), 2u);
  EXPECT_EQ(got[1], records[1]);
  EXPECT_THROW(read_trial_log(path), SchemaError);
  EXPECT_TRUE(read_partial_trial_log(dir / "absent.jsonl").empty());
}

TEST(TrialLog, PartialReadStillRejectsCorruptionMidFile) {
  fixtures::TempDir dir;
  const auto path = dir / "mid.jsonl";
  const auto records = sample_records(1, 2);
  append_raw(path, "garbage\n" + to_json_line(records[0]) + "\n");
  EXPECT_THROW(read_partial_trial_log(path), SchemaError);
}

TEST(TrialLog, ResumedWriterAppends) {
  fixtures::TempDir dir;
  const auto path = dir / "t.jsonl";
  const auto records = sample_records(1, 4);
  {
    TrialLogWriter w(path);
    w.append(std::span(records).first(2));
  }
  {
    TrialLogWriter w(path);
    w.append(std::span(records).subspan(2));
  }
  EXPECT_EQ(read_trial_log(path), records);
}

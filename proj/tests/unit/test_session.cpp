#include <gtest/gtest.h>

#include <map>
#include <set>

#include "panelist/error.hpp"
#include "panelist/mock_client.hpp"
#include "panelist/session.hpp"
#include "panelist/trial_log.hpp"
#include "support/fixtures.hpp"

using namespace panelist;

namespace {

class SessionTest : public ::testing::Test {
 protected:
  StudyDesign design = fixtures::make_design();
  PromptEngine engine;

  SessionOptions options(MemoryMode mode) const {
    SessionOptions o;
    o.mode = mode;
    o.params.model_id = "mock-model";
    o.clock = [] { return std::string("T"); };
    return o;
  }

  CachedChatClient client(MockPolicy policy) const {
    return CachedChatClient(std::make_shared<ScriptedMockClient>(design, engine, std::move(policy)));
  }
};

std::map<Task, int> task_counts(const std::vector<TrialRecord>& records) {
  std::map<Task, int> n;
  for (const auto& r : records) ++n[r.task];
  return n;
}

}  // namespace

TEST(Permutation, DeterministicAndComplete) {
  std::mt19937_64 a(5), b(5), c(6);
  const auto pa = seeded_permutation(16, a);
  EXPECT_EQ(pa, seeded_permutation(16, b));
  EXPECT_NE(pa, seeded_permutation(16, c));
  std::set<std::size_t> s(pa.begin(), pa.end());
  EXPECT_EQ(s.size(), 16u);
  EXPECT_EQ(*s.rbegin(), 15u);
}

TEST(Permutation, PinnedSequence) {
  // Platform-independent: mt19937_64 output is standardized and the bounded
  // draw is explicit.
  std::mt19937_64 e(42);
  const auto p = seeded_permutation(8, e);
  std::mt19937_64 e2(42);
  std::vector<std::size_t> expect(8);
  for (std::size_t i = 0; i < 8; ++i) expect[i] = i;
  for (std::size_t i = 8; i > 1; --i) {
    const std::uint64_t threshold = (0 - static_cast<std::uint64_t>(i)) % i;
    std::uint64_t r = e2();
    while (r < threshold) r = e2();
    std::swap(expect[i - 1], expect[r % i]);
  }
  EXPECT_EQ(p, expect);
}

TEST_F(SessionTest, UsersAreBalancedAcrossConditions) {
  const auto users = make_llm_users(design, 40, 3, 9);
  ASSERT_EQ(users.size(), 40u);
  std::map<std::size_t, int> per_cell;
  for (const auto& u : users) {
    ++per_cell[condition_index(u.condition)];
    EXPECT_EQ(u.runs, (std::vector<int>{0, 1, 2}));
    EXPECT_NE(u.permutation_task1, u.permutation_task2);
  }
  for (const auto& [c, n] : per_cell) EXPECT_EQ(n, 10);
  EXPECT_EQ(users[3].user_id, "u0003");
  EXPECT_EQ(users[5].index_in_condition, 1);
  EXPECT_EQ(make_llm_users(design, 40, 3, 9)[7].permutation_task1, users[7].permutation_task1);
}

TEST_F(SessionTest, UnbalancedUserCountIsConfigError) {
  try {
    make_llm_users(design, 42, 1, 1);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("40 or 44"), std::string::npos) << e.what();
  }
  EXPECT_THROW(make_llm_users(design, 0, 1, 1), ConfigError);
  EXPECT_THROW(make_llm_users(design, 4, 0, 1), ConfigError);
}

TEST_F(SessionTest, WithMemoryIsOneContextInProtocolOrder) {
  const auto users = make_llm_users(design, 4, 1, 3);
  auto c = client(mock_policies::always_agree());
  const auto res = run_session(design, engine, users[2], 0, options(MemoryMode::WithMemory), c);
  ASSERT_EQ(res.records.size(), 48u);
  ASSERT_EQ(res.contexts.size(), 1u);
  const auto& ctx = res.contexts[0];
  // system + 16 * 2 + 16 * 4
  ASSERT_EQ(ctx.size(), 1u + 32u + 64u);
  EXPECT_EQ(ctx[0].role, Role::System);
  const auto& cases = design.cases_for(users[2].condition);
  for (int i = 0; i < 16; ++i) {
    EXPECT_EQ(res.records[i].task, Task::Helpfulness);
    EXPECT_EQ(res.records[i].case_id, cases.task1[users[2].permutation_task1[i]].item.id);
  }
  for (int k = 0; k < 16; ++k) {
    const auto& p = res.records[16 + 2 * k];
    const auto& q = res.records[17 + 2 * k];
    EXPECT_EQ(p.task, Task::Prediction);
    EXPECT_EQ(q.task, Task::Confidence);
    EXPECT_EQ(p.case_id, cases.task2[users[2].permutation_task2[k]].id);
    EXPECT_EQ(q.case_id, p.case_id);
    EXPECT_TRUE(p.correct.has_value());
  }
  for (int i = 0; i < 48; ++i) EXPECT_EQ(res.records[i].position, i);
  const auto n = task_counts(res.records);
  EXPECT_EQ(n.at(Task::Helpfulness), 16);
  EXPECT_EQ(n.at(Task::Prediction), 16);
  EXPECT_EQ(n.at(Task::Confidence), 16);
}

TEST_F(SessionTest, IsolationUsesFreshContextsWithFewShotPrefix) {
  const auto users = make_llm_users(design, 4, 1, 3);
  auto c = client(mock_policies::always_agree());
  const auto res = run_session(design, engine, users[1], 0, options(MemoryMode::Isolation), c);
  ASSERT_EQ(res.records.size(), 48u);
  ASSERT_EQ(res.contexts.size(), 32u);
  for (int i = 0; i < 16; ++i) {
    ASSERT_EQ(res.contexts[i].size(), 3u);  // system, task-1 prompt, answer
    EXPECT_EQ(res.contexts[i][0].role, Role::System);
  }
  const auto& cases = design.cases_for(users[1].condition);
  for (int k = 16; k < 32; ++k) {
    const auto& ctx = res.contexts[k];
    ASSERT_EQ(ctx.size(), 1u + 32u + 4u);
    // Few-shot pairs follow the task-1 permutation.
    for (int j = 0; j < 16; ++j) {
      const auto& ec = cases.task1[users[1].permutation_task1[j]];
      EXPECT_EQ(ctx[1 + 2 * j].content, engine.render_task2(ec.item, users[1].condition).user_message);
      EXPECT_EQ(ctx[2 + 2 * j].content, label_text(ec.ai_prediction));
    }
  }
}

TEST_F(SessionTest, UnparseableAnswerIsReaskedOnceThenMissing) {
  const auto users = make_llm_users(design, 4, 1, 3);
  const auto& target = design.cases_for(users[0].condition).task1[5].item.id;
  const auto& fixed = design.cases_for(users[0].condition).task1[6].item.id;
  auto policy = [&](const MockQuery& q) -> std::optional<std::string> {
    if (q.task == Task::Helpfulness && q.item->id == target) return std::string("I refuse");
    if (q.task == Task::Helpfulness && q.item->id == fixed) {
      return std::string(q.reask ? "Disagree" : "Hmm, hard to say");
    }
    return mock_policies::always_agree()(q);
  };
  auto c = client(policy);
  const auto res = run_session(design, engine, users[0], 0, options(MemoryMode::WithMemory), c);
  int seen = 0;
  for (const auto& r : res.records) {
    if (r.case_id == target && r.task == Task::Helpfulness) {
      ++seen;
      EXPECT_TRUE(r.missing());
      EXPECT_EQ(r.attempts, 2);
      EXPECT_EQ(r.raw_response, "I refuse\nI refuse");
      EXPECT_EQ(r.parse_status, ParseStatus::Unparseable);
    }
    if (r.case_id == fixed && r.task == Task::Helpfulness) {
      ++seen;
      EXPECT_FALSE(r.missing());
      EXPECT_EQ(*r.code, 2);
      EXPECT_EQ(r.attempts, 2);
    }
  }
  EXPECT_EQ(seen, 2);
  EXPECT_EQ(res.contexts[0].size(), 1u + 96u + 4u);
}

TEST_F(SessionTest, ConfidenceWithoutPredictionIsRejected) {
  Conversation ctx = {{Role::System, "x"}};
  EXPECT_THROW(require_prediction_before_confidence(ctx, engine, kAllConditions[0]), ProtocolOrderError);
  ctx.push_back({Role::User, engine.render_task1(design.conditions[0].task1[0], kAllConditions[0]).user_message});
  ctx.push_back({Role::Assistant, "Agree"});
  EXPECT_THROW(require_prediction_before_confidence(ctx, engine, kAllConditions[0]), ProtocolOrderError);
  ctx.push_back({Role::User, engine.render_task2(design.conditions[0].task2[0], kAllConditions[0]).user_message});
  EXPECT_THROW(require_prediction_before_confidence(ctx, engine, kAllConditions[0]), ProtocolOrderError);
  ctx.push_back({Role::Assistant, "?"});
  EXPECT_NO_THROW(require_prediction_before_confidence(ctx, engine, kAllConditions[0]));
  ctx.push_back({Role::User, engine.clarification(Task::Prediction, FamiliarityDomain::High)});
  ctx.push_back({Role::Assistant, "Over the limit"});
  EXPECT_NO_THROW(require_prediction_before_confidence(ctx, engine, kAllConditions[0]));
}

TEST_F(SessionTest, TransportErrorsPropagate) {
  const auto users = make_llm_users(design, 4, 1, 3);
  auto c = client([](const MockQuery&) -> std::optional<std::string> { return std::nullopt; });
  EXPECT_THROW(run_session(design, engine, users[0], 0, options(MemoryMode::WithMemory), c),
               UnscriptedPromptError);
}

TEST_F(SessionTest, StudyIsIndependentOfConcurrency) {
  const auto users = make_llm_users(design, 8, 2, 11);
  StudyRunOptions o;
  o.session = options(MemoryMode::WithMemory);
  auto c1 = client(mock_policies::hashed());
  o.concurrency = 1;
  const auto a = run_study(design, engine, users, o, c1);
  auto c8 = client(mock_policies::hashed());
  o.concurrency = 8;
  const auto b = run_study(design, engine, users, o, c8);
  ASSERT_EQ(a.size(), 8u * 2u * 48u);
  EXPECT_EQ(a, b);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end(), protocol_order));
}

TEST_F(SessionTest, StudyReusesCompleteSessionsOnResume) {
  const auto users = make_llm_users(design, 4, 1, 11);
  StudyRunOptions o;
  o.session = options(MemoryMode::WithMemory);
  auto inner = std::make_shared<ScriptedMockClient>(design, engine, mock_policies::hashed());
  CachedChatClient c(inner);
  const auto full = run_study(design, engine, users, o, c);
  const auto calls_full = inner->call_count();

  // Keep two complete sessions and half of a third.
  std::vector<TrialRecord> partial;
  for (const auto& r : full) {
    if (r.user_id == "u0000" || r.user_id == "u0001" || (r.user_id == "u0002" && r.position < 20)) {
      partial.push_back(r);
    }
  }
  o.resume_from = partial;
  auto inner2 = std::make_shared<ScriptedMockClient>(design, engine, mock_policies::hashed());
  CachedChatClient c2(inner2);
  const auto resumed = run_study(design, engine, users, o, c2);
  EXPECT_EQ(resumed, full);
  EXPECT_EQ(inner2->call_count(), calls_full / 2);
}

TEST_F(SessionTest, FirstFailureStopsTheStudy) {
  const auto users = make_llm_users(design, 8, 1, 11);
  StudyRunOptions o;
  o.session = options(MemoryMode::WithMemory);
  o.concurrency = 4;
  const auto bad = users[5].user_id;
  auto c = client([&](const MockQuery& q) -> std::optional<std::string> {
    if (q.sample_index == 1 && q.condition == users[5].condition) return std::nullopt;
    return mock_policies::always_agree()(q);
  });
  EXPECT_THROW(run_study(design, engine, users, o, c), UnscriptedPromptError);
}

TEST(TrialRecordJson, RoundTrip) {
  TrialRecord r;
  r.model_id = "m";
  r.mode = MemoryMode::Isolation;
  r.user_id = "u0001";
  r.run_id = 2;
  r.condition = kAllConditions[3];
  r.task = Task::Confidence;
  r.position = 17;
  r.case_id = "low_counterfactual-t2-3";
  r.raw_response = "Very confident\n\"quoted\"";
  r.parse_status = ParseStatus::Ok;
  r.code = 5;
  r.attempts = 2;
  r.prompt_digest = "abc";
  r.served_from_cache = true;
  r.timestamp = "2024-01-01T00:00:00Z";
  const auto line = to_json_line(r);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  EXPECT_NE(line.find("\"follows_case_id\""), std::string::npos);
  EXPECT_EQ(parse_trial_line(line), r);

  r.task = Task::Prediction;
  r.code.reset();
  r.label = BinaryLabel::NotSafe;
  r.correct = 0;
  EXPECT_EQ(parse_trial_line(to_json_line(r)), r);
  EXPECT_THROW(parse_trial_line("{}"), SchemaError);
  EXPECT_THROW(parse_trial_line("not json"), SchemaError);
}

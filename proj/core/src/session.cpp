#include "panelist/session.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "panelist/error.hpp"
#include "panelist/trial_log.hpp"

namespace panelist {

namespace {

using json = nlohmann::ordered_json;

std::uint64_t bounded_draw(std::mt19937_64& engine, std::uint64_t bound) {
  // Rejection sampling on the low end keeps r % bound exactly uniform.
  const std::uint64_t threshold = (0 - bound) % bound;
  std::uint64_t r = engine();
  while (r < threshold) r = engine();
  return r % bound;
}

std::string format_user_id(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "u%04d", index);
  return buf;
}

struct Answer {
  std::string raw;
  ParseStatus status = ParseStatus::Unparseable;
  std::optional<int> code;
  std::optional<BinaryLabel> label;
  int attempts = 1;
  bool cached = false;
};

class Session {
 public:
  Session(const StudyDesign& design, const PromptEngine& engine, const LlmUser& user, int run_id,
          const SessionOptions& options, CachedChatClient& client)
      : design_(design), engine_(engine), user_(user), run_id_(run_id), options_(options),
        client_(client), cases_(design.cases_for(user.condition)) {
    const auto runs = std::max<std::size_t>(1, user.runs.size());
    sample_index_ = static_cast<std::uint64_t>(user.index_in_condition) * runs +
                    static_cast<std::uint64_t>(run_id);
    if (user.permutation_task1.size() != kCasesPerTask ||
        user.permutation_task2.size() != kCasesPerTask) {
      throw ConfigError("user " + user.user_id + " lacks 16-case permutations");
    }
  }

  SessionResult run() {
    if (options_.mode == MemoryMode::WithMemory) {
      run_with_memory();
    } else {
      run_isolated();
    }
    return std::move(result_);
  }

 private:
  Conversation fresh_context() const {
    Conversation ctx;
    const auto& preamble = engine_.config().preambles[condition_index(user_.condition)];
    if (!preamble.empty()) ctx.push_back({Role::System, preamble});
    return ctx;
  }

  Answer parse(Task task, const std::string& raw) const {
    Answer a;
    a.raw = raw;
    switch (task) {
      case Task::Helpfulness:
      case Task::Confidence: {
        const auto p = parse_likert(
            raw, task == Task::Helpfulness ? LikertScale::Agreement : LikertScale::Confidence);
        a.status = p.status;
        a.code = p.value;
        break;
      }
      case Task::Prediction: {
        const auto p = parse_prediction(raw, user_.condition.familiarity);
        a.status = p.status;
        a.label = p.value;
        break;
      }
    }
    return a;
  }

  Answer ask(Conversation& ctx, const std::string& prompt, Task task) {
    ctx.push_back({Role::User, prompt});
    auto reply = client_.cached_chat(ctx, options_.params, sample_index_);
    ctx.push_back({Role::Assistant, reply.text});
    auto answer = parse(task, reply.text);
    answer.cached = reply.served_from_cache;
    if (answer.status == ParseStatus::Ok) return answer;

    ctx.push_back({Role::User, engine_.clarification(task, user_.condition.familiarity)});
    auto retry = client_.cached_chat(ctx, options_.params, sample_index_);
    ctx.push_back({Role::Assistant, retry.text});
    auto second = parse(task, retry.text);
    second.attempts = 2;
    second.cached = answer.cached && retry.served_from_cache;
    if (second.status != ParseStatus::Ok) {
      // Keep the first reply on record; the re-ask did not help.
      second.raw = answer.raw + "\n" + retry.text;
    }
    return second;
  }

  void emit(Task task, const std::string& case_id, const std::string& prompt, const Answer& a) {
    TrialRecord r;
    r.model_id = options_.params.model_id;
    r.mode = options_.mode;
    r.user_id = user_.user_id;
    r.run_id = run_id_;
    r.condition = user_.condition;
    r.task = task;
    r.position = static_cast<int>(result_.records.size());
    r.case_id = case_id;
    r.raw_response = a.raw;
    r.parse_status = a.status;
    r.code = a.code;
    r.label = a.label;
    if (task == Task::Prediction && a.label) {
      const auto* item = design_.find_task2_case(case_id);
      r.correct = code_accuracy(*a.label, *item, options_.oracle);
    }
    r.attempts = a.attempts;
    r.prompt_digest = prompt_digest(prompt);
    r.served_from_cache = a.cached;
    r.timestamp = options_.clock ? options_.clock() : utc_now();
    result_.records.push_back(std::move(r));
  }

  void helpfulness_turn(Conversation& ctx, const ExplainedCase& ec) {
    const auto prompt = engine_.render_task1(ec, user_.condition).user_message;
    const auto a = ask(ctx, prompt, Task::Helpfulness);
    emit(Task::Helpfulness, ec.item.id, prompt, a);
  }

  void prediction_pair(Conversation& ctx, const Case& c) {
    const auto prompt2 = engine_.render_task2(c, user_.condition).user_message;
    const auto a2 = ask(ctx, prompt2, Task::Prediction);
    emit(Task::Prediction, c.id, prompt2, a2);

    require_prediction_before_confidence(ctx, engine_, user_.condition);
    const auto prompt3 = engine_.render_task3(user_.condition).user_message;
    const auto a3 = ask(ctx, prompt3, Task::Confidence);
    emit(Task::Confidence, c.id, prompt3, a3);
  }

  void run_with_memory() {
    auto ctx = fresh_context();
    for (auto i : user_.permutation_task1) helpfulness_turn(ctx, cases_.task1.at(i));
    for (auto i : user_.permutation_task2) prediction_pair(ctx, cases_.task2.at(i));
    result_.contexts.push_back(std::move(ctx));
  }

  void run_isolated() {
    for (auto i : user_.permutation_task1) {
      auto ctx = fresh_context();
      helpfulness_turn(ctx, cases_.task1.at(i));
      result_.contexts.push_back(std::move(ctx));
    }
    std::vector<ExplainedCase> permuted;
    permuted.reserve(kCasesPerTask);
    for (auto i : user_.permutation_task1) permuted.push_back(cases_.task1.at(i));
    const auto fewshot = engine_.fewshot_messages(engine_.build_fewshot_context(permuted));
    for (auto i : user_.permutation_task2) {
      auto ctx = fresh_context();
      ctx.insert(ctx.end(), fewshot.begin(), fewshot.end());
      prediction_pair(ctx, cases_.task2.at(i));
      result_.contexts.push_back(std::move(ctx));
    }
  }

  const StudyDesign& design_;
  const PromptEngine& engine_;
  const LlmUser& user_;
  int run_id_;
  const SessionOptions& options_;
  CachedChatClient& client_;
  const ConditionCases& cases_;
  std::uint64_t sample_index_ = 0;
  SessionResult result_;
};

std::string template_prefix(const std::string& tmpl) { return tmpl.substr(0, tmpl.find("{case}")); }

}  // namespace

std::string_view to_string(MemoryMode m) {
  return m == MemoryMode::WithMemory ? "memory" : "isolation";
}

std::optional<MemoryMode> parse_memory_mode(std::string_view s) {
  if (s == "memory") return MemoryMode::WithMemory;
  if (s == "isolation") return MemoryMode::Isolation;
  return std::nullopt;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::mt19937_64& engine) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(bounded_draw(engine, i));
    std::swap(p[i - 1], p[j]);
  }
  return p;
}

std::vector<LlmUser> make_llm_users(const StudyDesign& design, int n_users, int runs_per_user,
                                    std::uint64_t seed) {
  if (n_users <= 0 || n_users % 4 != 0) {
    const int lower = n_users - n_users % 4;
    const std::string hint = lower >= 4
                                 ? std::to_string(lower) + " or " + std::to_string(lower + 4)
                                 : std::string("4");
    throw ConfigError("number of LLM-users (" + std::to_string(n_users) +
                      ") is not divisible by 4; use " + hint + " for balanced cells");
  }
  if (runs_per_user <= 0) throw ConfigError("runs_per_user must be positive");
  validate(design);

  std::mt19937_64 engine(seed);
  std::vector<LlmUser> users;
  users.reserve(static_cast<std::size_t>(n_users));
  for (int i = 0; i < n_users; ++i) {
    LlmUser u;
    u.user_id = format_user_id(i);
    u.index = i;
    u.index_in_condition = i / 4;
    u.condition = kAllConditions[static_cast<std::size_t>(i % 4)];
    u.permutation_task1 = seeded_permutation(kCasesPerTask, engine);
    u.permutation_task2 = seeded_permutation(kCasesPerTask, engine);
    for (int r = 0; r < runs_per_user; ++r) u.runs.push_back(r);
    users.push_back(std::move(u));
  }
  return users;
}

std::string to_json_line(const TrialRecord& r) {
  json j;
  j["model"] = r.model_id;
  j["mode"] = to_string(r.mode);
  j["user"] = r.user_id;
  j["run"] = r.run_id;
  j["condition"] = condition_key(r.condition);
  j["task"] = to_string(r.task);
  j["position"] = r.position;
  j[r.task == Task::Confidence ? "follows_case_id" : "case_id"] = r.case_id;
  j["raw"] = r.raw_response;
  j["status"] = to_string(r.parse_status);
  if (r.code) j["code"] = *r.code;
  if (r.label) j["label"] = label_key(*r.label);
  if (r.correct) j["correct"] = *r.correct;
  j["attempts"] = r.attempts;
  j["prompt_digest"] = r.prompt_digest;
  j["cached"] = r.served_from_cache;
  j["timestamp"] = r.timestamp;
  return j.dump();
}

TrialRecord parse_trial_line(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    TrialRecord r;
    r.model_id = j.at("model").get<std::string>();
    const auto mode = parse_memory_mode(j.at("mode").get<std::string>());
    const auto cond = parse_condition_key(j.at("condition").get<std::string>());
    const auto task = parse_task(j.at("task").get<std::string>());
    if (!mode || !cond || !task) throw SchemaError("bad mode, condition or task");
    r.mode = *mode;
    r.user_id = j.at("user").get<std::string>();
    r.run_id = j.at("run").get<int>();
    r.condition = *cond;
    r.task = *task;
    r.position = j.at("position").get<int>();
    r.case_id = j.at(r.task == Task::Confidence ? "follows_case_id" : "case_id").get<std::string>();
    r.raw_response = j.at("raw").get<std::string>();
    const auto status = j.at("status").get<std::string>();
    if (status == "ok") {
      r.parse_status = ParseStatus::Ok;
    } else if (status == "ambiguous") {
      r.parse_status = ParseStatus::Ambiguous;
    } else if (status == "unparseable") {
      r.parse_status = ParseStatus::Unparseable;
    } else {
      throw SchemaError("bad status '" + status + "'");
    }
    if (j.contains("code")) r.code = j["code"].get<int>();
    if (j.contains("label")) {
      r.label = parse_label_key(j["label"].get<std::string>());
      if (!r.label) throw SchemaError("bad label");
    }
    if (j.contains("correct")) r.correct = j["correct"].get<int>();
    r.attempts = j.at("attempts").get<int>();
    r.prompt_digest = j.at("prompt_digest").get<std::string>();
    r.served_from_cache = j.at("cached").get<bool>();
    r.timestamp = j.at("timestamp").get<std::string>();
    if (r.parse_status == ParseStatus::Ok && !r.code && !r.label) {
      throw SchemaError("parsed record without a value");
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed trial record: ") + e.what());
  }
}

bool protocol_order(const TrialRecord& a, const TrialRecord& b) {
  return std::tie(a.model_id, a.user_id, a.run_id, a.position) <
         std::tie(b.model_id, b.user_id, b.run_id, b.position);
}

void require_prediction_before_confidence(const Conversation& context, const PromptEngine& engine,
                                          Condition condition) {
  const auto dom = condition.familiarity;
  const auto prefix = template_prefix(dom == FamiliarityDomain::High
                                          ? engine.config().templates.task2_high
                                          : engine.config().templates.task2_low);
  const auto reask = engine.clarification(Task::Prediction, dom);
  if (context.empty() || context.back().role != Role::Assistant) {
    throw ProtocolOrderError("confidence question issued without a preceding prediction");
  }
  for (std::size_t i = context.size(); i-- > 0;) {
    const auto& m = context[i];
    if (m.role != Role::User) continue;
    if (m.content == reask) continue;
    if (m.content.rfind(prefix, 0) == 0) return;
    break;
  }
  throw ProtocolOrderError("confidence question issued without a preceding prediction");
}

SessionResult run_session(const StudyDesign& design, const PromptEngine& engine,
                          const LlmUser& user, int run_id, const SessionOptions& options,
                          CachedChatClient& client) {
  validate(options.params);
  return Session(design, engine, user, run_id, options, client).run();
}

std::vector<TrialRecord> run_study(const StudyDesign& design, const PromptEngine& engine,
                                   const std::vector<LlmUser>& users,
                                   const StudyRunOptions& options, CachedChatClient& client) {
  validate(options.session.params);
  using SessionKey = std::pair<std::string, int>;
  std::map<SessionKey, std::vector<TrialRecord>> reused;
  for (const auto& r : options.resume_from) {
    if (r.model_id != options.session.params.model_id || r.mode != options.session.mode) continue;
    reused[{r.user_id, r.run_id}].push_back(r);
  }
  for (auto it = reused.begin(); it != reused.end();) {
    std::set<int> positions;
    for (const auto& r : it->second) positions.insert(r.position);
    if (positions.size() == kRecordsPerRun && it->second.size() == kRecordsPerRun) {
      ++it;
    } else {
      it = reused.erase(it);
    }
  }

  struct Job {
    const LlmUser* user;
    int run;
  };
  std::vector<Job> jobs;
  std::vector<TrialRecord> all;
  for (const auto& u : users) {
    for (int r : u.runs) {
      if (auto it = reused.find({u.user_id, r}); it != reused.end()) {
        all.insert(all.end(), it->second.begin(), it->second.end());
      } else {
        jobs.push_back({&u, r});
      }
    }
  }

  std::mutex mutex;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr first_error;
  auto worker = [&] {
    while (!stop.load()) {
      const auto i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        auto res = run_session(design, engine, *jobs[i].user, jobs[i].run, options.session, client);
        if (options.log) options.log->append(res.records);
        std::lock_guard lock(mutex);
        all.insert(all.end(), std::make_move_iterator(res.records.begin()),
                   std::make_move_iterator(res.records.end()));
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!first_error) first_error = std::current_exception();
        stop.store(true);
      }
    }
  };

  const int n_threads = std::clamp(options.concurrency, 1, 256);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);

  std::stable_sort(all.begin(), all.end(), protocol_order);
  return all;
}

}  // namespace panelist

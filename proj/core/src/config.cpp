#include "panelist/config.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include <nlohmann/json.hpp>

#include "panelist/digest.hpp"
#include "panelist/error.hpp"

namespace panelist {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) { throw ConfigError("config: " + what); }

void reject_unknown(const json& obj, std::string_view where, std::initializer_list<std::string_view> known) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      fail("unknown field '" + key + "' in " + std::string(where));
    }
  }
}

std::string get_string(const json& obj, const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_string()) fail(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

int get_int(const json& obj, const char* key, int min) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) fail(std::string("'") + key + "' must be an integer");
  const auto x = v.get<std::int64_t>();
  if (x < min || x > std::numeric_limits<int>::max()) {
    fail(std::string("'") + key + "' must be at least " + std::to_string(min));
  }
  return static_cast<int>(x);
}

double get_double(const json& obj, const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_number()) fail(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative()) path = base / path;
  return path.lexically_normal();
}

ModelConfig parse_model(const json& m) {
  if (m.is_string()) {
    ModelConfig mc;
    mc.id = m.get<std::string>();
    return mc;
  }
  if (!m.is_object()) fail("each entry of 'models' must be an object or a model id");
  reject_unknown(m, "models[]",
                 {"id", "base_url", "path", "temperature", "max_tokens", "seed", "max_concurrency",
                  "max_retries"});
  ModelConfig mc;
  if (!m.contains("id")) fail("model entry without 'id'");
  mc.id = get_string(m, "id");
  if (m.contains("base_url")) mc.base_url = get_string(m, "base_url");
  if (m.contains("path")) mc.path = get_string(m, "path");
  if (m.contains("temperature")) mc.temperature = get_double(m, "temperature");
  if (m.contains("max_tokens")) mc.max_tokens = get_int(m, "max_tokens", 1);
  if (m.contains("seed") && !m.at("seed").is_null()) {
    if (!m.at("seed").is_number_integer()) fail("model 'seed' must be an integer");
    mc.seed = m.at("seed").get<std::int64_t>();
  }
  if (m.contains("max_concurrency")) mc.max_concurrency = get_int(m, "max_concurrency", 1);
  if (m.contains("max_retries")) mc.retry.max_retries = get_int(m, "max_retries", 0);
  if (mc.temperature < 0) fail("model '" + mc.id + "': temperature must be >= 0");
  return mc;
}

void parse_prompts(const json& p, PromptConfig& out) {
  reject_unknown(p, "prompts", {"preambles", "templates"});
  if (p.contains("preambles")) {
    const auto& pre = p.at("preambles");
    if (!pre.is_object()) fail("'prompts.preambles' must be an object keyed by condition");
    for (const auto& [key, text] : pre.items()) {
      const auto c = parse_condition_key(key);
      if (!c) fail("unknown condition '" + key + "' in prompts.preambles");
      if (!text.is_string()) fail("preamble for '" + key + "' must be a string");
      out.preambles[condition_index(*c)] = text.get<std::string>();
    }
  }
  if (p.contains("templates")) {
    const auto& t = p.at("templates");
    if (!t.is_object()) fail("'prompts.templates' must be an object");
    reject_unknown(t, "prompts.templates", {"task1", "task2_high", "task2_low", "task3"});
    if (t.contains("task1")) out.templates.task1 = get_string(t, "task1");
    if (t.contains("task2_high")) out.templates.task2_high = get_string(t, "task2_high");
    if (t.contains("task2_low")) out.templates.task2_low = get_string(t, "task2_low");
    if (t.contains("task3")) out.templates.task3 = get_string(t, "task3");
  }
}

StudyConfig parse_config_impl(std::string_view text, const std::filesystem::path& base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("top level must be an object");
  reject_unknown(j, "config",
                 {"cases", "human_reference", "models", "memory_mode", "aggregate", "n_llm_users",
                  "runs_per_user", "seed", "cache_dir", "output_dir", "accuracy_oracle",
                  "mse_granularity", "concurrency", "prompts"});

  StudyConfig c;
  if (!j.contains("cases")) fail("missing 'cases'");
  if (!j.contains("human_reference")) fail("missing 'human_reference'");
  c.cases_path = resolve(base, get_string(j, "cases"));
  c.reference_path = resolve(base, get_string(j, "human_reference"));
  for (const auto* p : {&c.cases_path, &c.reference_path}) {
    if (!std::filesystem::is_regular_file(*p)) fail("file not found: " + p->string());
  }

  if (j.contains("models")) {
    if (!j.at("models").is_array()) fail("'models' must be an array");
    std::set<std::string> seen;
    for (const auto& m : j.at("models")) {
      auto mc = parse_model(m);
      if (!seen.insert(mc.id).second) fail("duplicate model id '" + mc.id + "'");
      c.models.push_back(std::move(mc));
    }
  }
  if (j.contains("memory_mode")) {
    const auto m = parse_memory_mode(get_string(j, "memory_mode"));
    if (!m) fail("'memory_mode' must be \"memory\" or \"isolation\"");
    c.memory_mode = *m;
  }
  if (j.contains("aggregate")) {
    const auto& a = j.at("aggregate");
    bool on = true;
    if (a.is_boolean()) {
      on = a.get<bool>();
    } else if (a.is_string() && (a == "on" || a == "off")) {
      on = a == "on";
    } else {
      fail("'aggregate' must be true/false or \"on\"/\"off\"");
    }
    c.aggregation = on ? AggregationMode::Aggregated : AggregationMode::PerRun;
  }
  if (j.contains("n_llm_users")) c.n_llm_users = get_int(j, "n_llm_users", 1);
  if (j.contains("runs_per_user")) c.runs_per_user = get_int(j, "runs_per_user", 1);
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) fail("'seed' must be a non-negative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("cache_dir") && !j.at("cache_dir").is_null()) {
    c.cache_dir = resolve(base, get_string(j, "cache_dir"));
  }
  if (j.contains("output_dir")) c.output_dir = resolve(base, get_string(j, "output_dir"));
  if (j.contains("accuracy_oracle")) {
    const auto o = parse_accuracy_oracle(get_string(j, "accuracy_oracle"));
    if (!o) fail("'accuracy_oracle' must be \"truth_label\" or \"ai_prediction\"");
    c.accuracy_oracle = *o;
  }
  if (j.contains("mse_granularity")) {
    const auto g = parse_mse_granularity(get_string(j, "mse_granularity"));
    if (!g) fail("'mse_granularity' must be \"per_condition\" or \"per_case\"");
    c.mse_granularity = *g;
  }
  if (j.contains("concurrency")) c.concurrency = get_int(j, "concurrency", 1);
  if (j.contains("prompts")) {
    if (!j.at("prompts").is_object()) fail("'prompts' must be an object");
    parse_prompts(j.at("prompts"), c.prompts);
  }
  if (c.n_llm_users && *c.n_llm_users % 4 != 0) {
    fail("n_llm_users = " + std::to_string(*c.n_llm_users) + " is not divisible by 4");
  }
  return c;
}

}  // namespace

StudyConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  try {
    return parse_config_impl(json_text, base_dir);
  } catch (const json::exception& e) {
    fail(e.what());
  }
}

StudyConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error&) {
    fail("cannot read " + path.string());
  }
  return parse_config(text, path.parent_path());
}

void apply_overrides(StudyConfig& c, const ConfigOverrides& o, bool allow_new_model) {
  if (o.model) {
    const auto it = std::find_if(c.models.begin(), c.models.end(),
                                 [&](const ModelConfig& m) { return m.id == *o.model; });
    if (it != c.models.end()) {
      ModelConfig keep = *it;
      c.models = {std::move(keep)};
    } else if (allow_new_model) {
      ModelConfig m;
      m.id = *o.model;
      c.models = {std::move(m)};
    } else {
      fail("model '" + *o.model + "' is not listed in the config");
    }
  }
  if (o.mode) c.memory_mode = *o.mode;
  if (o.aggregation) c.aggregation = *o.aggregation;
  if (o.users) {
    if (*o.users < 1 || *o.users % 4 != 0) {
      fail("--users " + std::to_string(*o.users) + " is not a positive multiple of 4");
    }
    c.n_llm_users = *o.users;
  }
  if (o.runs) {
    if (*o.runs < 1) fail("--runs must be at least 1");
    c.runs_per_user = *o.runs;
  }
  if (o.seed) c.seed = *o.seed;
  if (o.cache_dir) c.cache_dir = *o.cache_dir;
  if (o.output_dir) c.output_dir = *o.output_dir;
  if (o.concurrency) {
    if (*o.concurrency < 1) fail("--concurrency must be at least 1");
    c.concurrency = *o.concurrency;
  }
}

std::string config_snapshot(const StudyConfig& c) {
  nlohmann::ordered_json j;
  j["cases"] = c.cases_path.filename().string();
  j["human_reference"] = c.reference_path.filename().string();
  auto models = nlohmann::ordered_json::array();
  for (const auto& m : c.models) {
    nlohmann::ordered_json mj;
    mj["id"] = m.id;
    mj["base_url"] = m.base_url;
    mj["path"] = m.path;
    mj["temperature"] = m.temperature;
    mj["max_tokens"] = m.max_tokens;
    mj["seed"] = m.seed ? nlohmann::ordered_json(*m.seed) : nlohmann::ordered_json();
    mj["max_concurrency"] = m.max_concurrency;
    mj["max_retries"] = m.retry.max_retries;
    models.push_back(std::move(mj));
  }
  j["models"] = std::move(models);
  j["memory_mode"] = to_string(c.memory_mode);
  j["aggregate"] = c.aggregation == AggregationMode::Aggregated;
  j["n_llm_users"] = c.n_llm_users ? nlohmann::ordered_json(*c.n_llm_users) : nlohmann::ordered_json();
  j["runs_per_user"] =
      c.runs_per_user ? nlohmann::ordered_json(*c.runs_per_user) : nlohmann::ordered_json();
  j["seed"] = c.seed ? nlohmann::ordered_json(*c.seed) : nlohmann::ordered_json();
  j["cache"] = !c.cache_dir.empty();
  j["accuracy_oracle"] = to_string(c.accuracy_oracle);
  j["mse_granularity"] = to_string(c.mse_granularity);
  nlohmann::ordered_json prompts;
  auto pre = nlohmann::ordered_json::object();
  for (const auto& cond : kAllConditions) {
    pre[condition_key(cond)] = c.prompts.preambles[condition_index(cond)];
  }
  prompts["preambles"] = std::move(pre);
  prompts["templates"] = {{"task1", c.prompts.templates.task1},
                          {"task2_high", c.prompts.templates.task2_high},
                          {"task2_low", c.prompts.templates.task2_low},
                          {"task3", c.prompts.templates.task3}};
  j["prompts"] = std::move(prompts);
  return j.dump(2);
}

std::string file_safe(std::string_view id) {
  std::string out;
  out.reserve(id.size());
  for (char ch : id) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
                    ch == '-' || ch == '_' || ch == '.';
    out.push_back(ok ? ch : '_');
  }
  if (out.empty() || out == "." || out == "..") out = "model";
  return out;
}

}  // namespace panelist

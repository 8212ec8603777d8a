#include "panelist/study.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "panelist/digest.hpp"
#include "panelist/error.hpp"

namespace panelist {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr std::array<FieldSpec, 6> kHighFields = {{
    {"name", "Name"},
    {"weight", "Weight"},
    {"units_of_alcohol", "Units of alcohol consumed"},
    {"duration", "Duration"},
    {"gender", "Gender"},
    {"stomach_content", "Stomach content"},
}};

constexpr std::array<FieldSpec, 6> kLowFields = {{
    {"chemical_name", "Chemical name"},
    {"occupational_exposure_limit", "Occupational exposure limit"},
    {"ph", "pH"},
    {"exposure_duration", "Exposure duration"},
    {"air_pollution_rating", "Air pollution rating"},
    {"pnec_rating", "PNEC rating"},
}};

[[noreturn]] void fail(const std::string& msg) { throw SchemaError(msg); }

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string(what) + ": invalid JSON: " + e.what());
  }
}

std::string where(std::string_view id, std::string_view field) {
  return "case '" + std::string(id) + "', field '" + std::string(field) + "'";
}

std::string scalar_to_string(const json& v, std::string_view id, std::string_view field) {
  if (v.is_string()) {
    return v.get<std::string>();
  }
  if (v.is_number()) {
    return v.dump();
  }
  fail(where(id, field) + ": value must be a string or number");
}

const json& require(const json& obj, std::string_view key, std::string_view ctx) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    fail(std::string(ctx) + ": missing '" + std::string(key) + "'");
  }
  return *it;
}

std::string require_string(const json& obj, std::string_view key, std::string_view ctx) {
  const auto& v = require(obj, key, ctx);
  if (!v.is_string()) {
    fail(std::string(ctx) + ": '" + std::string(key) + "' must be a string");
  }
  return v.get<std::string>();
}

BinaryLabel parse_label_field(const json& obj, std::string_view key, std::string_view id,
                              FamiliarityDomain domain) {
  const auto text = require_string(obj, key, "case '" + std::string(id) + "'");
  auto label = parse_label_key(text);
  if (!label) {
    fail(where(id, key) + ": unknown label '" + text + "'");
  }
  if (domain_of(*label) != domain) {
    fail(where(id, key) + ": label '" + text + "' does not belong to the " +
         std::string(to_string(domain)) + " familiarity domain");
  }
  return *label;
}

std::vector<Feature> parse_features(const json& obj, std::string_view id, FamiliarityDomain domain) {
  const auto& feats = require(obj, "features", "case '" + std::string(id) + "'");
  if (!feats.is_object()) {
    fail(where(id, "features") + ": must be an object");
  }
  const auto fields = required_fields(domain);
  for (const auto& [name, _] : feats.items()) {
    const bool known = std::any_of(fields.begin(), fields.end(),
                                   [&](const FieldSpec& f) { return f.key == name; });
    if (!known) {
      fail(where(id, name) + ": not a field of the " + std::string(to_string(domain)) +
           " familiarity domain");
    }
  }
  std::vector<Feature> out;
  out.reserve(fields.size());
  for (const auto& f : fields) {
    auto it = feats.find(f.key);
    if (it == feats.end()) {
      fail(where(id, f.key) + ": required field missing");
    }
    out.push_back({std::string(f.key), scalar_to_string(*it, id, f.key)});
  }
  return out;
}

void check_case_shape(const Case& c) {
  const auto fields = required_fields(c.domain);
  if (c.features.size() != fields.size()) {
    fail("case '" + c.id + "': expected " + std::to_string(fields.size()) + " fields, got " +
         std::to_string(c.features.size()));
  }
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (c.features[i].name != fields[i].key) {
      fail(where(c.id, fields[i].key) + ": field missing or out of canonical order");
    }
  }
  if (c.truth_label && domain_of(*c.truth_label) != c.domain) {
    fail(where(c.id, "truth_label") + ": label outside the case's domain");
  }
  if (c.ai_prediction && domain_of(*c.ai_prediction) != c.domain) {
    fail(where(c.id, "ai_prediction") + ": label outside the case's domain");
  }
}

ordered_json features_json(const Case& c) {
  ordered_json f = ordered_json::object();
  for (const auto& feat : c.features) {
    f[feat.name] = feat.value;
  }
  return f;
}

}  // namespace

std::string_view to_string(FamiliarityDomain d) {
  return d == FamiliarityDomain::High ? "high" : "low";
}

std::string_view to_string(ExplanationType e) {
  return e == ExplanationType::Causal ? "causal" : "counterfactual";
}

std::string condition_key(Condition c) {
  return std::string(to_string(c.familiarity)) + "_" + std::string(to_string(c.explanation));
}

std::optional<FamiliarityDomain> parse_domain(std::string_view s) {
  if (s == "high") return FamiliarityDomain::High;
  if (s == "low") return FamiliarityDomain::Low;
  return std::nullopt;
}

std::optional<ExplanationType> parse_explanation_type(std::string_view s) {
  if (s == "causal") return ExplanationType::Causal;
  if (s == "counterfactual") return ExplanationType::Counterfactual;
  return std::nullopt;
}

std::optional<Condition> parse_condition_key(std::string_view key) {
  for (const auto& c : kAllConditions) {
    if (condition_key(c) == key) {
      return c;
    }
  }
  return std::nullopt;
}

FamiliarityDomain domain_of(BinaryLabel label) {
  switch (label) {
    case BinaryLabel::OverTheLimit:
    case BinaryLabel::UnderTheLimit:
      return FamiliarityDomain::High;
    case BinaryLabel::Safe:
    case BinaryLabel::NotSafe:
      return FamiliarityDomain::Low;
  }
  return FamiliarityDomain::High;
}

std::array<BinaryLabel, 2> labels_for(FamiliarityDomain d) {
  if (d == FamiliarityDomain::High) {
    return {BinaryLabel::OverTheLimit, BinaryLabel::UnderTheLimit};
  }
  return {BinaryLabel::Safe, BinaryLabel::NotSafe};
}

BinaryLabel opposite(BinaryLabel label) {
  switch (label) {
    case BinaryLabel::OverTheLimit: return BinaryLabel::UnderTheLimit;
    case BinaryLabel::UnderTheLimit: return BinaryLabel::OverTheLimit;
    case BinaryLabel::Safe: return BinaryLabel::NotSafe;
    case BinaryLabel::NotSafe: return BinaryLabel::Safe;
  }
  return label;
}

std::string_view label_key(BinaryLabel label) {
  switch (label) {
    case BinaryLabel::OverTheLimit: return "over_the_limit";
    case BinaryLabel::UnderTheLimit: return "under_the_limit";
    case BinaryLabel::Safe: return "safe";
    case BinaryLabel::NotSafe: return "not_safe";
  }
  return "";
}

std::string_view label_text(BinaryLabel label) {
  switch (label) {
    case BinaryLabel::OverTheLimit: return "Over the limit";
    case BinaryLabel::UnderTheLimit: return "Under the limit";
    case BinaryLabel::Safe: return "Safe";
    case BinaryLabel::NotSafe: return "Not safe";
  }
  return "";
}

std::optional<BinaryLabel> parse_label_key(std::string_view key) {
  for (auto l : {BinaryLabel::OverTheLimit, BinaryLabel::UnderTheLimit, BinaryLabel::Safe,
                 BinaryLabel::NotSafe}) {
    if (label_key(l) == key) {
      return l;
    }
  }
  return std::nullopt;
}

std::span<const FieldSpec> required_fields(FamiliarityDomain d) {
  if (d == FamiliarityDomain::High) {
    return kHighFields;
  }
  return kLowFields;
}

const ConditionCases& StudyDesign::cases_for(Condition c) const {
  return conditions.at(condition_index(c));
}

const Case* StudyDesign::find_task2_case(std::string_view id) const {
  for (const auto& cc : conditions) {
    for (const auto& c : cc.task2) {
      if (c.id == id) return &c;
    }
  }
  return nullptr;
}

const ExplainedCase* StudyDesign::find_task1_case(std::string_view id) const {
  for (const auto& cc : conditions) {
    for (const auto& c : cc.task1) {
      if (c.item.id == id) return &c;
    }
  }
  return nullptr;
}

void validate(const StudyDesign& design) {
  if (design.conditions.size() != kConditionCount) {
    fail("expected 4 conditions, got " + std::to_string(design.conditions.size()));
  }
  if (design.n_llm_users <= 0) fail("n_llm_users must be positive");
  if (design.runs_per_user <= 0) fail("runs_per_user must be positive");
  std::set<std::string, std::less<>> ids;
  auto claim = [&](const std::string& id) {
    if (id.empty()) fail("case with empty id");
    if (!ids.insert(id).second) fail("duplicate case id '" + id + "'");
  };
  for (std::size_t i = 0; i < kConditionCount; ++i) {
    const auto& cc = design.conditions[i];
    const auto key = condition_key(cc.condition);
    if (condition_index(cc.condition) != i) {
      fail("condition '" + key + "' stored out of canonical order or duplicated");
    }
    if (cc.task1.size() != kCasesPerTask) {
      fail("condition '" + key + "' task1: expected 16 cases, got " +
           std::to_string(cc.task1.size()));
    }
    if (cc.task2.size() != kCasesPerTask) {
      fail("condition '" + key + "' task2: expected 16 cases, got " +
           std::to_string(cc.task2.size()));
    }
    for (const auto& ec : cc.task1) {
      claim(ec.item.id);
      if (ec.item.domain != cc.condition.familiarity) {
        fail("case '" + ec.item.id + "': domain does not match condition '" + key + "'");
      }
      check_case_shape(ec.item);
      if (domain_of(ec.ai_prediction) != ec.item.domain) {
        fail(where(ec.item.id, "ai_prediction") + ": label outside the case's domain");
      }
      if (ec.explanation_text.empty()) {
        fail(where(ec.item.id, "explanation") + ": explanation text is empty");
      }
      if (ec.explanation_type != cc.condition.explanation) {
        fail("case '" + ec.item.id + "': explanation type does not match condition '" + key + "'");
      }
    }
    for (const auto& c : cc.task2) {
      claim(c.id);
      if (c.domain != cc.condition.familiarity) {
        fail("case '" + c.id + "': domain does not match condition '" + key + "'");
      }
      check_case_shape(c);
      if (!c.truth_label) {
        fail(where(c.id, "truth_label") + ": required for task2 cases");
      }
    }
  }
}

namespace {

StudyDesign parse_cases_impl(std::string_view json_text) {
  const auto doc = parse_json(json_text, "cases file");
  if (!doc.is_object()) fail("cases file: top level must be an object");
  const auto& conds = require(doc, "conditions", "cases file");
  if (!conds.is_array()) fail("cases file: 'conditions' must be an array");

  StudyDesign design;
  design.conditions.resize(kConditionCount);
  std::array<bool, kConditionCount> seen{};

  for (const auto& cj : conds) {
    if (!cj.is_object()) fail("cases file: condition entries must be objects");
    const auto fam_s = require_string(cj, "familiarity", "condition");
    const auto exp_s = require_string(cj, "explanation_type", "condition");
    const auto fam = parse_domain(fam_s);
    const auto exp = parse_explanation_type(exp_s);
    if (!fam) fail("condition: unknown familiarity '" + fam_s + "'");
    if (!exp) fail("condition: unknown explanation_type '" + exp_s + "'");
    const Condition cond{*fam, *exp};
    const auto idx = condition_index(cond);
    const auto key = condition_key(cond);
    if (seen[idx]) fail("condition '" + key + "' appears twice");
    seen[idx] = true;

    ConditionCases cc;
    cc.condition = cond;
    const auto& t1 = require(cj, "task1", "condition '" + key + "'");
    const auto& t2 = require(cj, "task2", "condition '" + key + "'");
    if (!t1.is_array() || !t2.is_array()) {
      fail("condition '" + key + "': task1 and task2 must be arrays");
    }
    for (const auto& item : t1) {
      if (!item.is_object()) fail("condition '" + key + "' task1: entries must be objects");
      ExplainedCase ec;
      ec.item.id = require_string(item, "id", "condition '" + key + "' task1 entry");
      ec.item.domain = *fam;
      ec.item.features = parse_features(item, ec.item.id, *fam);
      ec.ai_prediction = parse_label_field(item, "ai_prediction", ec.item.id, *fam);
      ec.item.ai_prediction = ec.ai_prediction;
      if (item.contains("truth_label")) {
        ec.item.truth_label = parse_label_field(item, "truth_label", ec.item.id, *fam);
      }
      ec.explanation_text = require_string(item, "explanation", "case '" + ec.item.id + "'");
      ec.explanation_type = *exp;
      cc.task1.push_back(std::move(ec));
    }
    for (const auto& item : t2) {
      if (!item.is_object()) fail("condition '" + key + "' task2: entries must be objects");
      Case c;
      c.id = require_string(item, "id", "condition '" + key + "' task2 entry");
      c.domain = *fam;
      c.features = parse_features(item, c.id, *fam);
      c.truth_label = parse_label_field(item, "truth_label", c.id, *fam);
      if (item.contains("ai_prediction")) {
        c.ai_prediction = parse_label_field(item, "ai_prediction", c.id, *fam);
      }
      cc.task2.push_back(std::move(c));
    }
    design.conditions[idx] = std::move(cc);
  }
  for (std::size_t i = 0; i < kConditionCount; ++i) {
    if (!seen[i]) fail("condition '" + condition_key(kAllConditions[i]) + "' missing");
  }

  if (auto it = doc.find("n_llm_users"); it != doc.end()) design.n_llm_users = it->get<int>();
  if (auto it = doc.find("runs_per_user"); it != doc.end()) design.runs_per_user = it->get<int>();
  if (auto it = doc.find("seed"); it != doc.end()) design.seed = it->get<std::uint64_t>();

  validate(design);
  return design;
}

HumanReference parse_reference_impl(std::string_view json_text);

}  // namespace

StudyDesign parse_cases(std::string_view json_text) {
  try {
    return parse_cases_impl(json_text);
  } catch (const json::exception& e) {
    fail(std::string("cases file: ") + e.what());
  }
}

StudyDesign load_cases(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw SchemaError(e.what());
  }
  return parse_cases(text);
}

std::string serialize_cases(const StudyDesign& design) {
  ordered_json doc;
  doc["n_llm_users"] = design.n_llm_users;
  doc["runs_per_user"] = design.runs_per_user;
  doc["seed"] = design.seed;
  ordered_json conds = ordered_json::array();
  for (const auto& cc : design.conditions) {
    ordered_json cj;
    cj["familiarity"] = to_string(cc.condition.familiarity);
    cj["explanation_type"] = to_string(cc.condition.explanation);
    ordered_json t1 = ordered_json::array();
    for (const auto& ec : cc.task1) {
      ordered_json item;
      item["id"] = ec.item.id;
      item["features"] = features_json(ec.item);
      item["ai_prediction"] = label_key(ec.ai_prediction);
      if (ec.item.truth_label) item["truth_label"] = label_key(*ec.item.truth_label);
      item["explanation"] = ec.explanation_text;
      t1.push_back(std::move(item));
    }
    ordered_json t2 = ordered_json::array();
    for (const auto& c : cc.task2) {
      ordered_json item;
      item["id"] = c.id;
      item["features"] = features_json(c);
      if (c.truth_label) item["truth_label"] = label_key(*c.truth_label);
      if (c.ai_prediction) item["ai_prediction"] = label_key(*c.ai_prediction);
      t2.push_back(std::move(item));
    }
    cj["task1"] = std::move(t1);
    cj["task2"] = std::move(t2);
    conds.push_back(std::move(cj));
  }
  doc["conditions"] = std::move(conds);
  return doc.dump(2) + "\n";
}

std::string_view to_string(Measure m) {
  switch (m) {
    case Measure::Helpfulness: return "helpfulness";
    case Measure::Accuracy: return "accuracy";
    case Measure::Confidence: return "confidence";
  }
  return "";
}

std::string_view to_string(Effect e) {
  switch (e) {
    case Effect::Familiarity: return "familiarity";
    case Effect::Explanation: return "explanation";
    case Effect::Interaction: return "interaction";
  }
  return "";
}

std::optional<Measure> parse_measure(std::string_view s) {
  for (auto m : kAllMeasures) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

std::optional<Effect> parse_effect(std::string_view s) {
  for (auto e : kAllEffects) {
    if (to_string(e) == s) return e;
  }
  return std::nullopt;
}

std::string_view to_string(Sign s) {
  switch (s) {
    case Sign::Negative: return "-";
    case Sign::None: return "none";
    case Sign::Positive: return "+";
  }
  return "none";
}

std::optional<Sign> parse_sign(std::string_view s) {
  if (s == "+") return Sign::Positive;
  if (s == "-") return Sign::Negative;
  if (s == "none" || s.empty()) return Sign::None;
  return std::nullopt;
}

double HumanReference::mean(Measure m, Condition c) const {
  return means[static_cast<std::size_t>(m)][condition_index(c)];
}

const EffectVerdict& HumanReference::effect(Measure m, Effect e) const {
  return effects[static_cast<std::size_t>(m)][static_cast<std::size_t>(e)];
}

HumanReference parse_human_reference(std::string_view json_text) {
  try {
    return parse_reference_impl(json_text);
  } catch (const json::exception& e) {
    fail(std::string("human reference: ") + e.what());
  }
}

namespace {

HumanReference parse_reference_impl(std::string_view json_text) {
  const auto doc = parse_json(json_text, "human reference");
  if (!doc.is_object()) fail("human reference: top level must be an object");
  HumanReference ref;

  const auto& means = require(doc, "means", "human reference");
  const auto& effects = require(doc, "effects", "human reference");
  for (auto m : kAllMeasures) {
    const auto mi = static_cast<std::size_t>(m);
    const auto mname = std::string(to_string(m));
    auto mit = means.find(mname);
    if (mit == means.end()) fail("human reference: missing means for measure '" + mname + "'");
    for (const auto& c : kAllConditions) {
      auto cit = mit->find(condition_key(c));
      if (cit == mit->end() || !cit->is_number()) {
        fail("human reference: missing mean for (" + mname + ", " + condition_key(c) + ")");
      }
      const double v = cit->get<double>();
      const bool in_range = m == Measure::Accuracy ? (v >= 0.0 && v <= 1.0) : (v >= 1.0 && v <= 5.0);
      if (!in_range) {
        fail("human reference: mean for (" + mname + ", " + condition_key(c) + ") out of range");
      }
      ref.means[mi][condition_index(c)] = v;
    }

    auto eit = effects.find(mname);
    for (auto e : kAllEffects) {
      const auto ename = std::string(to_string(e));
      const auto pair = "(" + mname + ", " + ename + ")";
      if (eit == effects.end() || !eit->contains(ename)) {
        fail("human reference: missing effect entry " + pair);
      }
      const auto& ej = (*eit)[ename];
      if (!ej.is_object() || !ej.contains("significant") || !ej["significant"].is_boolean()) {
        fail("human reference: effect entry " + pair + " needs a boolean 'significant'");
      }
      EffectVerdict v;
      v.significant = ej["significant"].get<bool>();
      const auto dir = ej.value("direction", std::string("none"));
      auto sign = parse_sign(dir);
      if (!sign) fail("human reference: effect entry " + pair + ": bad direction '" + dir + "'");
      if (v.significant && *sign == Sign::None) {
        fail("human reference: effect entry " + pair + " is significant but has no direction");
      }
      if (!v.significant && *sign != Sign::None) {
        fail("human reference: effect entry " + pair + " has a direction but is not significant");
      }
      v.direction = *sign;
      ref.effects[mi][static_cast<std::size_t>(e)] = v;
    }
  }

  if (auto pit = doc.find("per_case_means"); pit != doc.end()) {
    std::array<std::array<CaseMeans, kConditionCount>, 3> pcm;
    for (auto m : kAllMeasures) {
      auto mit = pit->find(std::string(to_string(m)));
      if (mit == pit->end()) continue;
      for (const auto& c : kAllConditions) {
        auto cit = mit->find(condition_key(c));
        if (cit == mit->end()) continue;
        for (const auto& [id, v] : cit->items()) {
          pcm[static_cast<std::size_t>(m)][condition_index(c)][id] = v.get<double>();
        }
      }
    }
    ref.per_case_means = std::move(pcm);
  }
  return ref;
}

}  // namespace

HumanReference load_human_reference(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw SchemaError(e.what());
  }
  return parse_human_reference(text);
}

std::string serialize_human_reference(const HumanReference& ref) {
  ordered_json doc;
  ordered_json means;
  ordered_json effects;
  for (auto m : kAllMeasures) {
    const auto mi = static_cast<std::size_t>(m);
    ordered_json mj;
    for (const auto& c : kAllConditions) mj[condition_key(c)] = ref.means[mi][condition_index(c)];
    means[std::string(to_string(m))] = std::move(mj);
    ordered_json ej;
    for (auto e : kAllEffects) {
      const auto& v = ref.effects[mi][static_cast<std::size_t>(e)];
      ej[std::string(to_string(e))] = {{"significant", v.significant},
                                       {"direction", to_string(v.direction)}};
    }
    effects[std::string(to_string(m))] = std::move(ej);
  }
  doc["means"] = std::move(means);
  doc["effects"] = std::move(effects);
  if (ref.per_case_means) {
    ordered_json pj;
    for (auto m : kAllMeasures) {
      ordered_json mj;
      for (const auto& c : kAllConditions) {
        const auto& cm = (*ref.per_case_means)[static_cast<std::size_t>(m)][condition_index(c)];
        if (cm.empty()) continue;
        ordered_json cj = ordered_json::object();
        for (const auto& [id, v] : cm) cj[id] = v;
        mj[condition_key(c)] = std::move(cj);
      }
      if (!mj.empty()) pj[std::string(to_string(m))] = std::move(mj);
    }
    doc["per_case_means"] = std::move(pj);
  }
  return doc.dump(2) + "\n";
}

}  // namespace panelist

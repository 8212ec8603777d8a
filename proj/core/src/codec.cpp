#include "panelist/codec.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <vector>

#include "panelist/error.hpp"

namespace panelist {

namespace {

constexpr std::array<std::string_view, 5> kAgreement = {"Strongly disagree", "Disagree", "Neutral",
                                                        "Agree", "Strongly agree"};
constexpr std::array<std::string_view, 5> kConfidence = {
    "Not at all confident", "Not very confident", "Neither", "Fairly confident", "Very confident"};

struct Alias {
  std::string form;  // normalized surface form
  int target;        // index of the label it denotes
};

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

struct Hit {
  std::size_t begin;
  std::size_t end;
  int target;
};

// At most one distinct target may survive after dropping hits that lie
// inside a longer hit.
Parsed<int> match(std::string_view raw, const std::vector<Alias>& aliases) {
  const auto text = normalize_answer(raw);
  std::vector<Hit> hits;
  for (const auto& a : aliases) {
    std::size_t pos = 0;
    while ((pos = text.find(a.form, pos)) != std::string::npos) {
      const auto end = pos + a.form.size();
      const bool left_ok = pos == 0 || !is_word_char(text[pos - 1]);
      const bool right_ok = end == text.size() || !is_word_char(text[end]);
      if (left_ok && right_ok) {
        hits.push_back({pos, end, a.target});
      }
      ++pos;
    }
  }
  std::set<int> targets;
  for (const auto& h : hits) {
    const bool nested = std::any_of(hits.begin(), hits.end(), [&](const Hit& o) {
      return (o.end - o.begin) > (h.end - h.begin) && o.begin <= h.begin && h.end <= o.end;
    });
    if (!nested) {
      targets.insert(h.target);
    }
  }
  if (targets.empty()) {
    return {ParseStatus::Unparseable, std::nullopt};
  }
  if (targets.size() > 1) {
    return {ParseStatus::Ambiguous, std::nullopt};
  }
  return {ParseStatus::Ok, *targets.begin()};
}

const std::vector<Alias>& likert_aliases(LikertScale scale) {
  static const auto build = [](const std::array<std::string_view, 5>& labels) {
    std::vector<Alias> out;
    for (int i = 0; i < 5; ++i) {
      out.push_back({lower(labels[static_cast<std::size_t>(i)]), i});
    }
    return out;
  };
  static const auto agreement = build(kAgreement);
  static const auto confidence = build(kConfidence);
  return scale == LikertScale::Agreement ? agreement : confidence;
}

}  // namespace

const std::array<std::string_view, 5>& likert_labels(LikertScale scale) {
  return scale == LikertScale::Agreement ? kAgreement : kConfidence;
}

std::string_view likert_label(LikertScale scale, int code) {
  if (code < 1 || code > 5) {
    throw Error("likert code out of range: " + std::to_string(code));
  }
  return likert_labels(scale)[static_cast<std::size_t>(code - 1)];
}

std::string_view to_string(ParseStatus s) {
  switch (s) {
    case ParseStatus::Ok: return "ok";
    case ParseStatus::Unparseable: return "unparseable";
    case ParseStatus::Ambiguous: return "ambiguous";
  }
  return "";
}

std::string normalize_answer(std::string_view raw) {
  auto strip = [](unsigned char c) {
    return std::isspace(c) || std::ispunct(c);
  };
  std::size_t b = 0;
  std::size_t e = raw.size();
  while (b < e && strip(static_cast<unsigned char>(raw[b]))) ++b;
  while (e > b && strip(static_cast<unsigned char>(raw[e - 1]))) --e;
  return lower(raw.substr(b, e - b));
}

Parsed<int> parse_likert(std::string_view raw, LikertScale scale) {
  auto r = match(raw, likert_aliases(scale));
  if (r) {
    r.value = *r.value + 1;
  }
  return r;
}

Parsed<BinaryLabel> parse_prediction(std::string_view raw, FamiliarityDomain domain) {
  const auto labels = labels_for(domain);
  std::vector<Alias> aliases;
  for (int i = 0; i < 2; ++i) {
    aliases.push_back({lower(label_text(labels[static_cast<std::size_t>(i)])), i});
  }
  if (domain == FamiliarityDomain::High) {
    aliases.push_back({"over", 0});
    aliases.push_back({"under", 1});
  } else {
    aliases.push_back({"unsafe", 1});
  }
  auto r = match(raw, aliases);
  Parsed<BinaryLabel> out{r.status, std::nullopt};
  if (r) {
    out.value = labels[static_cast<std::size_t>(*r.value)];
  }
  return out;
}

std::string_view to_string(AccuracyOracle o) {
  return o == AccuracyOracle::TruthLabel ? "truth_label" : "ai_prediction";
}

std::optional<AccuracyOracle> parse_accuracy_oracle(std::string_view s) {
  if (s == "truth_label") return AccuracyOracle::TruthLabel;
  if (s == "ai_prediction") return AccuracyOracle::AiPrediction;
  return std::nullopt;
}

int code_accuracy(BinaryLabel prediction, const Case& item, AccuracyOracle oracle) {
  if (domain_of(prediction) != item.domain) {
    throw SchemaError("case '" + item.id + "': prediction '" + std::string(label_text(prediction)) +
                      "' is outside the case's domain");
  }
  const auto& target = oracle == AccuracyOracle::TruthLabel ? item.truth_label : item.ai_prediction;
  if (!target) {
    throw SchemaError("case '" + item.id + "': no " + std::string(to_string(oracle)) +
                      " to score accuracy against");
  }
  return prediction == *target ? 1 : 0;
}

}  // namespace panelist

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "panelist/study.hpp"

namespace panelist {

enum class LikertScale { Agreement, Confidence };

/// Canonical labels in listing order; index + 1 is the numeric code.
const std::array<std::string_view, 5>& likert_labels(LikertScale scale);

/// Label for a code in 1..5.
std::string_view likert_label(LikertScale scale, int code);

enum class ParseStatus { Ok, Unparseable, Ambiguous };

std::string_view to_string(ParseStatus s);

template <typename T>
struct Parsed {
  ParseStatus status = ParseStatus::Unparseable;
  std::optional<T> value;

  explicit operator bool() const noexcept { return status == ParseStatus::Ok; }
};

/// Lower-cases, trims whitespace, and strips surrounding punctuation and quotes.
std::string normalize_answer(std::string_view raw);

/// Maps free text onto a 1..5 code. Labels are matched at word boundaries;
/// an occurrence nested inside a longer matched label ("agree" inside
/// "strongly agree") does not count on its own.
Parsed<int> parse_likert(std::string_view raw, LikertScale scale);

/// Same matching rules over the two labels of `domain`. "Over"/"under" and
/// "unsafe" are accepted as short forms.
Parsed<BinaryLabel> parse_prediction(std::string_view raw, FamiliarityDomain domain);

/// Which label counts as the correct prediction.
enum class AccuracyOracle { TruthLabel, AiPrediction };

std::string_view to_string(AccuracyOracle o);
std::optional<AccuracyOracle> parse_accuracy_oracle(std::string_view s);

/// 1 iff `prediction` equals the oracle label of `item`. Throws SchemaError on
/// domain mismatch or when the oracle label is absent from the case.
int code_accuracy(BinaryLabel prediction, const Case& item,
                  AccuracyOracle oracle = AccuracyOracle::TruthLabel);

}  // namespace panelist

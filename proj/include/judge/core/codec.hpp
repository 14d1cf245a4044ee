#pragma once

// Canonical JSON encodings of the core types. Field names are
// lower_snake_case, byte sequences are base64 strings, and user-facing scores
// are decimal strings with six fractional digits. Problem-definition
// rationals (max_points, reference_score) are written losslessly.

#include "judge/core/error.hpp"
#include "judge/core/model.hpp"

#include "json.hpp"

namespace judge {

using Json = nlohmann::json;

Json rational_to_json(const Rational& v);  // lossless
Rational rational_from_json(const Json& j);  // number or string

void to_json(Json& j, Status s);
void from_json(const Json& j, Status& s);
void to_json(Json& j, ProblemKind k);
void from_json(const Json& j, ProblemKind& k);
void to_json(Json& j, Direction d);
void from_json(const Json& j, Direction& d);
void to_json(Json& j, PolicyKind p);
void from_json(const Json& j, PolicyKind& p);
void to_json(Json& j, CheckerKind c);
void from_json(const Json& j, CheckerKind& c);

void to_json(Json& j, const ScoringPolicy& v);
void from_json(const Json& j, ScoringPolicy& v);
void to_json(Json& j, const EvalParams& v);
void from_json(const Json& j, EvalParams& v);
void to_json(Json& j, const ResourceLimits& v);
void from_json(const Json& j, ResourceLimits& v);
void to_json(Json& j, const Alphabet& v);
void from_json(const Json& j, Alphabet& v);
void to_json(Json& j, const CheckerSpec& v);
void from_json(const Json& j, CheckerSpec& v);
void to_json(Json& j, const Visibility& v);
void from_json(const Json& j, Visibility& v);
void to_json(Json& j, const TestInstance& v);
void from_json(const Json& j, TestInstance& v);
void to_json(Json& j, const Problem& v);
void from_json(const Json& j, Problem& v);
void to_json(Json& j, const Submission& v);
void from_json(const Json& j, Submission& v);
void to_json(Json& j, const ExitInfo& v);
void from_json(const Json& j, ExitInfo& v);
void to_json(Json& j, const ExecStats& v);
void from_json(const Json& j, ExecStats& v);
void to_json(Json& j, const InstanceOutcome& v);
void from_json(const Json& j, InstanceOutcome& v);
void to_json(Json& j, const AggregateResult& v);
void from_json(const Json& j, AggregateResult& v);

/// Outcome encoding that additionally carries `score_exact`, for
/// persistence where six digits are not enough.
Json outcome_to_exact_json(const InstanceOutcome& v);

/// Decodes `j` as T, converting library exceptions to FormatError.
template <class T>
T decode(const Json& j) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(e.what());
  }
}

/// Parses text as JSON, throwing FormatError on syntax errors.
Json parse_json(std::string_view text);

}  // namespace judge

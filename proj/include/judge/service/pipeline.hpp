#pragma once

#include "judge/core/codec.hpp"
#include "judge/eval/eval.hpp"
#include "judge/scoring/scoring.hpp"

#include <filesystem>
#include <string>

namespace judge::service {

/// Records the judgement's ACC outcomes in `best`, then aggregates against
/// the updated table. The service reaches the same numbers by applying
/// events; `judge run` calls this directly.
AggregateResult score_judgement(const Problem& problem, scoring::BestTable& best, const std::string& submission_id,
                                const eval::Judgement& judgement);

/// Canonical AggregateResult encoding. Measured run statistics vary from
/// run to run and are left out unless asked for.
Json result_json(const AggregateResult& result, bool with_stats = false);

/// The same encoding with what the problem's visibility flags hide set to
/// null (or the instance list emptied when statuses are hidden).
Json visible_result_json(const AggregateResult& result, const Problem& problem, bool with_stats = false);

/// A submission of one file: a static binary when `language_id` is
/// "static_binary", a source file otherwise.
Submission submission_from_file(const std::filesystem::path& file, const std::string& language_id);

}  // namespace judge::service

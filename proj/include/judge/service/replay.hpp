#pragma once

#include "judge/service/state.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace judge::service {

/// One contest day (UTC calendar days, day 1 holding the first
/// submission), counting submissions by the day they were sent.
struct ReplayRow {
  int day = 0;
  /// Best accepted mean objective so far against the contest winner's,
  /// oriented so it falls toward 1. Unset before the first accepted
  /// submission and for problems without an objective.
  std::optional<Rational> best_ratio;
  /// Accepted submissions.
  int correct = 0;
  /// Wrong answer or an execution error: WA, TLE, MLE or RE. OLE, compile
  /// errors and internal errors count as neither.
  int incorrect = 0;
  /// Distinct users who submitted that day.
  int users_total = 0;
  /// Of those, users submitting for the first time.
  int users_new = 0;

  friend bool operator==(const ReplayRow&, const ReplayRow&) = default;
};

/// Contest time series of one problem. With no `problem_id` the journal
/// must hold exactly one problem. MalformedLog on inconsistent events;
/// UnknownProblem when the problem is not in the journal.
std::vector<ReplayRow> replay_contest(const std::vector<Event>& events,
                                      const std::optional<std::string>& problem_id = std::nullopt);
std::vector<ReplayRow> replay_contest(const std::filesystem::path& journal,
                                      const std::optional<std::string>& problem_id = std::nullopt);

/// `day,best_ratio,correct,incorrect,users_total,users_new`, ratio with six
/// decimals (empty when unset).
std::string replay_csv(const std::vector<ReplayRow>& rows);

/// Two stacked panels: the best-ratio line above, correct/incorrect bars
/// per day below.
std::string replay_svg(const std::vector<ReplayRow>& rows, const std::string& title);

}  // namespace judge::service

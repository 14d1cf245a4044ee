#pragma once

#include "judge/core/codec.hpp"
#include "judge/core/model.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace judge::scoring {

/// ACC iff every s_i is ACC, else the first non-ACC in instance
/// order; with `re_priority` any RE wins.
Status aggregate_status(std::span<const Status> statuses, bool re_priority = false);
Status aggregate_status(std::span<const InstanceOutcome> outcomes, bool re_priority = false);

/// Σ v_i over ACC outcomes.
Rational aggregate_score_sum(std::span<const InstanceOutcome> outcomes);

struct BestEntry {
  Rational score;
  /// Empty while the value is the author's reference score.
  std::string submission_id;

  friend bool operator==(const BestEntry&, const BestEntry&) = default;
};

/// b_i per instance id, plus who holds it.
struct BestTable {
  Direction direction = Direction::minimize;
  std::map<int, BestEntry> entries;

  /// Seeded with the problem's reference scores.
  static BestTable for_problem(const Problem& problem);
  const BestEntry* find(int instance_id) const;

  friend bool operator==(const BestTable&, const BestTable&) = default;
};

/// Replaces b_i iff `outcome` is ACC and strictly better under the
/// direction. Returns whether it did.
bool update_best(BestTable& best, const InstanceOutcome& outcome, const std::string& submission_id);

/// 100/|T| · Σ ratio_i, |T| = `instance_count`. Maximize: v_i / b_i;
/// minimize: b_i / v_i. DegenerateBest when a ratio's denominator is 0 or
/// an ACC instance has no best yet.
Rational aggregate_score_normalized(std::span<const InstanceOutcome> outcomes, const BestTable& best,
                                    std::size_t instance_count);

/// Aggregate status and score of one submission's outcomes under the
/// problem's policy. `best` is required for optimization_normalized.
AggregateResult aggregate(const Problem& problem, const std::string& submission_id,
                          std::vector<InstanceOutcome> outcomes, const BestTable* best);

/// A compile failure: status CE, score 0, no instances.
AggregateResult compile_error_result(const std::string& submission_id);

struct LeaderboardEntry {
  int rank = 0;
  std::string user_id;
  Rational score;
  std::string submission_id;
  std::int64_t submitted_at = 0;

  friend bool operator==(const LeaderboardEntry&, const LeaderboardEntry&) = default;
};

/// One judged submission as the leaderboard sees it.
struct ScoredSubmission {
  std::string submission_id;
  std::string user_id;
  std::int64_t submitted_at = 0;
  Rational score;
};

/// Best submission per user (higher score, then earlier, then smaller id),
/// sorted by score descending, submitted_at ascending, submission id
/// ascending. Ranks are the 1-based positions.
std::vector<LeaderboardEntry> build_leaderboard(std::vector<ScoredSubmission> submissions);

Json leaderboard_json(const std::vector<LeaderboardEntry>& entries);

}  // namespace judge::scoring

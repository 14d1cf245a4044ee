#include "judge/scoring/scoring.hpp"

#include "judge/core/error.hpp"

#include <algorithm>

namespace judge::scoring {

Status aggregate_status(std::span<const Status> statuses, bool re_priority) {
  if (re_priority && std::find(statuses.begin(), statuses.end(), Status::RE) != statuses.end()) {
    return Status::RE;
  }
  for (Status s : statuses) {
    if (s != Status::ACC) return s;
  }
  return Status::ACC;
}

Status aggregate_status(std::span<const InstanceOutcome> outcomes, bool re_priority) {
  std::vector<Status> statuses;
  statuses.reserve(outcomes.size());
  for (const auto& o : outcomes) statuses.push_back(o.status);
  return aggregate_status(statuses, re_priority);
}

Rational aggregate_score_sum(std::span<const InstanceOutcome> outcomes) {
  Rational total = 0;
  for (const auto& o : outcomes) {
    if (o.status == Status::ACC) total += o.score;
  }
  return total;
}

BestTable BestTable::for_problem(const Problem& problem) {
  BestTable t;
  t.direction = problem.direction;
  for (const auto& inst : problem.instances) {
    if (inst.reference_score) t.entries[inst.id] = BestEntry{*inst.reference_score, {}};
  }
  return t;
}

const BestEntry* BestTable::find(int instance_id) const {
  auto it = entries.find(instance_id);
  return it == entries.end() ? nullptr : &it->second;
}

bool update_best(BestTable& best, const InstanceOutcome& outcome, const std::string& submission_id) {
  if (outcome.status != Status::ACC) return false;
  auto it = best.entries.find(outcome.instance_id);
  if (it != best.entries.end()) {
    const bool better = best.direction == Direction::maximize ? outcome.score > it->second.score
                                                              : outcome.score < it->second.score;
    if (!better) return false;
    it->second = BestEntry{outcome.score, submission_id};
    return true;
  }
  best.entries.emplace(outcome.instance_id, BestEntry{outcome.score, submission_id});
  return true;
}

Rational aggregate_score_normalized(std::span<const InstanceOutcome> outcomes, const BestTable& best,
                                    std::size_t instance_count) {
  if (instance_count == 0) throw BoundsError("normalized score over an empty instance set");
  Rational total = 0;
  for (const auto& o : outcomes) {
    if (o.status != Status::ACC) continue;
    const auto* b = best.find(o.instance_id);
    if (b == nullptr) {
      throw DegenerateBest("instance " + std::to_string(o.instance_id) + " has no best score");
    }
    const Rational& num = best.direction == Direction::maximize ? o.score : b->score;
    const Rational& den = best.direction == Direction::maximize ? b->score : o.score;
    if (den == 0) {
      throw DegenerateBest("instance " + std::to_string(o.instance_id) + ": zero denominator in ratio");
    }
    total += num / den;
  }
  return total * 100 / static_cast<long long>(instance_count);
}

AggregateResult aggregate(const Problem& problem, const std::string& submission_id,
                          std::vector<InstanceOutcome> outcomes, const BestTable* best) {
  AggregateResult r;
  r.submission_id = submission_id;
  r.status = aggregate_status(outcomes, problem.policy.re_priority);
  if (problem.policy.kind == PolicyKind::optimization_normalized) {
    if (best == nullptr) throw DegenerateBest("normalized scoring needs a best table");
    r.score = aggregate_score_normalized(outcomes, *best, problem.instances.size());
  } else {
    r.score = aggregate_score_sum(outcomes);
  }
  r.per_instance = std::move(outcomes);
  return r;
}

AggregateResult compile_error_result(const std::string& submission_id) {
  AggregateResult r;
  r.submission_id = submission_id;
  r.status = Status::CE;
  r.score = 0;
  return r;
}

std::vector<LeaderboardEntry> build_leaderboard(std::vector<ScoredSubmission> submissions) {
  // Strict order: score desc, submitted_at asc, submission id asc.
  auto before = [](const ScoredSubmission& a, const ScoredSubmission& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.submitted_at != b.submitted_at) return a.submitted_at < b.submitted_at;
    return a.submission_id < b.submission_id;
  };
  std::map<std::string, ScoredSubmission> best_per_user;
  for (auto& s : submissions) {
    auto it = best_per_user.find(s.user_id);
    if (it == best_per_user.end()) {
      best_per_user.emplace(s.user_id, std::move(s));
    } else if (before(s, it->second)) {
      it->second = std::move(s);
    }
  }
  std::vector<ScoredSubmission> rows;
  rows.reserve(best_per_user.size());
  for (auto& [user, s] : best_per_user) rows.push_back(std::move(s));
  std::sort(rows.begin(), rows.end(), before);

  std::vector<LeaderboardEntry> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.push_back(LeaderboardEntry{static_cast<int>(i + 1), rows[i].user_id, rows[i].score,
                                   rows[i].submission_id, rows[i].submitted_at});
  }
  return out;
}

Json leaderboard_json(const std::vector<LeaderboardEntry>& entries) {
  Json out = Json::array();
  for (const auto& e : entries) {
    out.push_back(Json{{"rank", e.rank},
                       {"user_id", e.user_id},
                       {"score", to_decimal(e.score)},
                       {"submission_id", e.submission_id},
                       {"submitted_at", e.submitted_at}});
  }
  return out;
}

}  // namespace judge::scoring

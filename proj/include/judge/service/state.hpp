#pragma once

#include "judge/core/codec.hpp"
#include "judge/core/error.hpp"
#include "judge/core/model.hpp"
#include "judge/eval/eval.hpp"
#include "judge/scoring/scoring.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace judge::service {

class UnknownProblem : public JudgeError {
 public:
  using JudgeError::JudgeError;
};

class UnknownSubmission : public JudgeError {
 public:
  using JudgeError::JudgeError;
};

class PayloadTooLarge : public JudgeError {
 public:
  using JudgeError::JudgeError;
};

/// A request the service refuses as malformed (bad body, unknown language).
class InvalidRequest : public JudgeError {
 public:
  using JudgeError::JudgeError;
};

class DuplicateProblem : public JudgeError {
 public:
  using JudgeError::JudgeError;
};

enum class Lifecycle { queued, running, done };
enum class DoneKind { judged, compile_error, internal_error };

std::string_view to_string(Lifecycle s) noexcept;
std::string_view to_string(DoneKind k) noexcept;

struct SubmissionRecord {
  Submission submission;
  Lifecycle state = Lifecycle::queued;
  /// Claims so far, including ones lost to crashes.
  int attempts = 0;
  std::int64_t received_at = 0;
  std::optional<std::int64_t> started_at;
  std::optional<std::int64_t> finished_at;
  DoneKind done_kind = DoneKind::judged;
  eval::Judgement judgement;
  std::string internal_error;
};

struct ProblemEntry {
  Problem problem;
  std::string package_root;
  scoring::BestTable best;
  /// Submission ids in arrival order.
  std::vector<std::string> submissions;
};

namespace event {
inline constexpr std::string_view problem_registered = "problem_registered";
inline constexpr std::string_view submission_received = "submission_received";
inline constexpr std::string_view submission_claimed = "submission_claimed";
inline constexpr std::string_view submission_requeued = "submission_requeued";
inline constexpr std::string_view outcome_recorded = "outcome_recorded";
inline constexpr std::string_view submission_failed = "submission_failed";
}  // namespace event

/// One journal line. `at` is the wall clock (ms) when it was appended and
/// is the only clock state transitions ever read.
struct Event {
  std::uint64_t seq = 0;
  std::int64_t at = 0;
  std::string type;
  Json body;
};

Json event_to_json(const Event& e);
/// MalformedLog on anything that is not a well-formed event.
Event event_from_json(const Json& j);

Event problem_registered(const Problem& problem, const std::string& package_root);
Event submission_received(const Submission& submission);
Event submission_claimed(const std::string& submission_id);
Event submission_requeued(const std::string& submission_id, const std::string& reason);
Event outcome_recorded(const std::string& submission_id, const eval::Judgement& judgement);
Event submission_failed(const std::string& submission_id, const std::string& reason);

/// Everything the service knows, as a pure function of the events applied
/// so far. Applying an event twice, or one that no longer fits the
/// record's lifecycle, changes nothing, so retried work has at most one
/// visible effect. Best tables are updated while applying
/// outcome_recorded, so an outcome and its best updates cannot be split.
class ContestState {
 public:
  void apply(const Event& e);

  std::uint64_t last_seq() const noexcept { return last_seq_; }
  const std::map<std::string, ProblemEntry>& problems() const noexcept { return problems_; }
  const ProblemEntry* find_problem(const std::string& id) const;
  const SubmissionRecord* find_submission(const std::string& id) const;
  const std::vector<std::string>& arrival_order() const noexcept { return order_; }
  std::size_t submission_count() const noexcept { return records_.size(); }

  /// Oldest queued record whose user has nothing running.
  std::optional<std::string> next_claimable() const;
  std::vector<std::string> running() const;

  /// (s, v) under the current best table; nullopt until judged. CE
  /// records give the CE result; internal errors give nullopt.
  std::optional<AggregateResult> aggregate_of(const SubmissionRecord& r) const;
  std::vector<scoring::LeaderboardEntry> leaderboard(const std::string& problem_id) const;

  /// Lossless encoding (snapshots).
  Json to_json() const;
  static ContestState from_json(const Json& j);

  /// What users can observe, without clocks, attempt counts or measured
  /// run statistics: the basis for comparing two histories.
  Json results_json() const;

 private:
  SubmissionRecord* mutable_record(const std::string& id);

  std::uint64_t last_seq_ = 0;
  std::map<std::string, ProblemEntry> problems_;
  std::map<std::string, SubmissionRecord> records_;
  std::vector<std::string> order_;
};

/// Submission ids issued in arrival order; they sort the same way.
std::string submission_id_for(std::size_t index);

}  // namespace judge::service

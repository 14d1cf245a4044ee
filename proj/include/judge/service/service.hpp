#pragma once

#include "judge/compile/compile.hpp"
#include "judge/eval/eval.hpp"
#include "judge/sandbox/sandbox.hpp"
#include "judge/service/config.hpp"
#include "judge/service/journal.hpp"
#include "judge/service/state.hpp"

#include <atomic>
#include <condition_variable>
#include <functional>
#include <memory>
#include <shared_mutex>
#include <thread>

namespace judge::service {

/// Submission intake, the worker pool and every read the HTTP layer
/// serves. All state changes go through one journal append followed by
/// applying the same event in memory, under a single writer lock; readers
/// share a lock and so always see aggregates and best tables from the
/// same point in the journal.
class JudgeService {
 public:
  explicit JudgeService(ServiceConfig config);
  ~JudgeService();
  JudgeService(const JudgeService&) = delete;
  JudgeService& operator=(const JudgeService&) = delete;

  void start();
  /// Stops claiming work and joins the workers; in-flight runs finish.
  void stop();

  /// PackageMalformed, DuplicateProblem. Returns the problem id.
  std::string register_package(const std::filesystem::path& dir);

  /// Persists the submission as QUEUED and returns its id. UnknownProblem,
  /// PayloadTooLarge, InvalidRequest.
  std::string submit(const std::string& problem_id, const std::string& user_id, Payload payload);

  Json problems_json() const;
  Json problem_json(const std::string& id) const;
  /// UnknownSubmission.
  Json submission_json(const std::string& id) const;
  Json leaderboard_json(const std::string& problem_id) const;
  std::string replay_csv(const std::string& problem_id) const;

  /// Copy of the current state.
  ContestState state() const;
  /// Blocks until nothing is queued or running, or the timeout passes.
  bool wait_idle(std::chrono::milliseconds timeout) const;

  const ServiceConfig& config() const noexcept { return config_; }

  /// Called by a worker right after it claims a submission; tests use it
  /// to inject faults.
  void set_claim_hook(std::function<void(const std::string& submission_id, int attempt)> hook);

 private:
  void worker_main();
  Event append(Event e);
  void requeue_expired();
  std::shared_ptr<const eval::PreparedProblem> prepared(const std::string& problem_id);

  ServiceConfig config_;
  sandbox::Sandbox sandbox_;
  compile::ToolchainRegistry toolchains_;
  eval::ObjectiveRegistry objectives_;
  std::unique_ptr<eval::Engine> engine_;
  std::unique_ptr<Journal> journal_;

  mutable std::shared_mutex mutex_;
  mutable std::condition_variable_any work_cv_;
  ContestState state_;
  std::uint64_t events_since_snapshot_ = 0;

  std::mutex prepared_mutex_;
  std::map<std::string, std::shared_ptr<const eval::PreparedProblem>> prepared_;

  std::function<void(const std::string&, int)> claim_hook_;
  std::atomic<bool> stopping_{false};
  std::vector<std::thread> workers_;
};

std::int64_t now_ms();

}  // namespace judge::service

#include "judge/service/service.hpp"

#include "judge/service/pipeline.hpp"
#include "judge/problem/facility.hpp"
#include "judge/problem/package.hpp"
#include "judge/service/replay.hpp"

#include <chrono>
#include <iostream>

namespace judge::service {

namespace fs = std::filesystem;

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

namespace {

sandbox::SandboxConfig sandbox_config(const ServiceConfig& c) {
  sandbox::SandboxConfig s;
  s.scratch_root = fs::absolute(c.data_dir) / "scratch";
  s.max_parallel_runs = c.max_parallel_runs > 0 ? c.max_parallel_runs : c.workers;
  return s;
}

ServiceConfig prepared_config(ServiceConfig c) {
#ifdef JUDGE_DEFAULT_UI_DIR
  if (c.ui_dir.empty()) c.ui_dir = JUDGE_DEFAULT_UI_DIR;
#endif
  fs::create_directories(c.data_dir);
  c.data_dir = fs::absolute(c.data_dir);
  return c;
}

Json problem_summary(const Problem& p) {
  return Json{{"id", p.id},
              {"kind", p.kind},
              {"direction", p.direction},
              {"policy", p.policy},
              {"limits", p.limits},
              {"checker", to_string(p.checker.kind)},
              {"instance_count", p.instances.size()}};
}

Json optional_int(const std::optional<std::int64_t>& v) { return v ? Json(*v) : Json(); }

}  // namespace

JudgeService::JudgeService(ServiceConfig config)
    : config_(prepared_config(std::move(config))),
      sandbox_(sandbox_config(config_)),
      toolchains_(compile::ToolchainRegistry::load(
          config_.toolchains.empty() ? compile::ToolchainRegistry::default_path() : config_.toolchains)) {
  problem::install_objectives(objectives_);
  engine_ = std::make_unique<eval::Engine>(sandbox_, toolchains_, objectives_);
  journal_ = std::make_unique<Journal>(config_.journal_path());
  state_ = recover(config_.journal_path(), config_.snapshot_path());

  std::unique_lock lock(mutex_);
  // Claims held by a previous process died with it.
  for (const auto& id : state_.running()) append(submission_requeued(id, "service restarted"));
  for (const auto& dir : config_.problems) {
    auto problem = problem::load_package(dir);
    if (state_.find_problem(problem.id) == nullptr) {
      append(problem_registered(problem, fs::absolute(dir).string()));
    }
  }
}

JudgeService::~JudgeService() { stop(); }

void JudgeService::start() {
  if (!workers_.empty()) return;
  stopping_ = false;
  for (int i = 0; i < config_.workers; ++i) workers_.emplace_back([this] { worker_main(); });
}

void JudgeService::stop() {
  stopping_ = true;
  work_cv_.notify_all();
  for (auto& t : workers_) t.join();
  workers_.clear();
}

void JudgeService::set_claim_hook(std::function<void(const std::string&, int)> hook) {
  std::unique_lock lock(mutex_);
  claim_hook_ = std::move(hook);
}

Event JudgeService::append(Event e) {
  auto stamped = journal_->append(std::move(e), now_ms());
  state_.apply(stamped);
  if (config_.snapshot_every > 0 && ++events_since_snapshot_ >= static_cast<std::uint64_t>(config_.snapshot_every)) {
    write_snapshot(config_.snapshot_path(), state_);
    events_since_snapshot_ = 0;
  }
  return stamped;
}

std::string JudgeService::register_package(const fs::path& dir) {
  auto problem = problem::load_package(dir);
  std::unique_lock lock(mutex_);
  if (state_.find_problem(problem.id) != nullptr) {
    throw DuplicateProblem("problem '" + problem.id + "' is already registered");
  }
  const auto id = problem.id;
  append(problem_registered(problem, fs::absolute(dir).string()));
  return id;
}

std::string JudgeService::submit(const std::string& problem_id, const std::string& user_id, Payload payload) {
  if (user_id.empty()) throw InvalidRequest("user_id must not be empty");
  std::int64_t binary_cap = 0;
  {
    std::shared_lock lock(mutex_);
    const auto* entry = state_.find_problem(problem_id);
    if (entry == nullptr) throw UnknownProblem("unknown problem '" + problem_id + "'");
    binary_cap = entry->problem.limits.binary_size;
  }
  if (auto* src = std::get_if<SourcePayload>(&payload)) {
    if (toolchains_.find(src->language_id) == nullptr) {
      throw InvalidRequest("unknown language '" + src->language_id + "'");
    }
    if (src->files.empty()) throw InvalidRequest("submission has no source files");
    std::int64_t total = 0;
    for (const auto& f : src->files) total += static_cast<std::int64_t>(f.data.size());
    if (total > config_.max_source_bytes) {
      throw PayloadTooLarge("source is " + std::to_string(total) + " bytes, limit " +
                            std::to_string(config_.max_source_bytes));
    }
  } else {
    const auto size = static_cast<std::int64_t>(std::get<BinaryPayload>(payload).data.size());
    if (size > binary_cap) {
      throw PayloadTooLarge("binary is " + std::to_string(size) + " bytes, limit " + std::to_string(binary_cap));
    }
  }

  std::unique_lock lock(mutex_);
  Submission s;
  s.id = submission_id_for(state_.submission_count() + 1);
  s.problem_id = problem_id;
  s.user_id = user_id;
  s.payload = std::move(payload);
  s.submitted_at = now_ms();
  append(submission_received(s));
  work_cv_.notify_all();
  return s.id;
}

void JudgeService::requeue_expired() {
  const auto now = now_ms();
  for (const auto& id : state_.running()) {
    const auto* r = state_.find_submission(id);
    if (r->started_at && now - *r->started_at > config_.claim_timeout_ms) {
      append(submission_requeued(id, "claim expired"));
    }
  }
}

std::shared_ptr<const eval::PreparedProblem> JudgeService::prepared(const std::string& problem_id) {
  std::lock_guard guard(prepared_mutex_);
  if (auto it = prepared_.find(problem_id); it != prepared_.end()) return it->second;
  Problem problem;
  std::string root;
  {
    std::shared_lock lock(mutex_);
    const auto* entry = state_.find_problem(problem_id);
    if (entry == nullptr) throw InfrastructureError("problem '" + problem_id + "' vanished");
    problem = entry->problem;
    root = entry->package_root;
  }
  auto p = std::make_shared<const eval::PreparedProblem>(engine_->prepare(std::move(problem), root));
  prepared_.emplace(problem_id, p);
  return p;
}

void JudgeService::worker_main() {
  while (true) {
    std::string id;
    Submission submission;
    int attempt = 0;
    std::function<void(const std::string&, int)> hook;
    try {
      std::unique_lock lock(mutex_);
      while (true) {
        if (stopping_) return;
        requeue_expired();
        if (auto next = state_.next_claimable()) {
          id = *next;
          break;
        }
        work_cv_.wait_for(lock, std::chrono::seconds(1));
      }
      append(submission_claimed(id));
      const auto* r = state_.find_submission(id);
      submission = r->submission;
      attempt = r->attempts;
      hook = claim_hook_;
    } catch (const std::exception& e) {
      std::cerr << "judge worker: cannot claim work: " << e.what() << '\n';
      std::this_thread::sleep_for(std::chrono::seconds(1));
      continue;
    }

    Event done;
    try {
      if (hook) hook(id, attempt);
      auto problem = prepared(submission.problem_id);
      done = outcome_recorded(id, engine_->judge(submission, *problem));
    } catch (const std::exception& e) {
      // Judge-side faults are retried and never charged to the user.
      try {
        std::unique_lock lock(mutex_);
        const auto* r = state_.find_submission(id);
        if (r->state == Lifecycle::running) {
          append(r->attempts >= config_.max_attempts ? submission_failed(id, e.what())
                                                     : submission_requeued(id, e.what()));
        }
      } catch (const std::exception& inner) {
        std::cerr << "judge worker: " << inner.what() << '\n';
      }
      work_cv_.notify_all();
      continue;
    }
    try {
      std::unique_lock lock(mutex_);
      append(std::move(done));
    } catch (const std::exception& e) {
      std::cerr << "judge worker: cannot record outcome of " << id << ": " << e.what() << '\n';
    }
    work_cv_.notify_all();
  }
}

Json JudgeService::problems_json() const {
  std::shared_lock lock(mutex_);
  Json out = Json::array();
  for (const auto& [id, entry] : state_.problems()) out.push_back(problem_summary(entry.problem));
  return out;
}

Json JudgeService::problem_json(const std::string& id) const {
  std::shared_lock lock(mutex_);
  const auto* entry = state_.find_problem(id);
  if (entry == nullptr) throw UnknownProblem("unknown problem '" + id + "'");
  const auto& p = entry->problem;
  Json j = problem_summary(p);
  j["statement"] = p.statement;
  j["alphabet"] = p.alphabet;
  j["visibility"] = p.visibility;
  Json instances = Json::array();
  for (const auto& t : p.instances) instances.push_back({{"id", t.id}, {"max_points", to_decimal(t.max_points)}});
  j["instances"] = std::move(instances);
  auto languages = toolchains_.languages();
  languages.emplace_back("static_binary");
  j["languages"] = languages;
  return j;
}

Json JudgeService::submission_json(const std::string& id) const {
  std::shared_lock lock(mutex_);
  const auto* r = state_.find_submission(id);
  if (r == nullptr) throw UnknownSubmission("unknown submission '" + id + "'");
  const auto& s = r->submission;
  const auto* src = std::get_if<SourcePayload>(&s.payload);
  Json j{{"submission_id", s.id},
         {"problem_id", s.problem_id},
         {"user_id", s.user_id},
         {"language_id", src ? src->language_id : std::string("static_binary")},
         {"submitted_at", s.submitted_at},
         {"state", to_string(r->state)},
         {"attempts", r->attempts},
         {"received_at", r->received_at},
         {"started_at", optional_int(r->started_at)},
         {"finished_at", optional_int(r->finished_at)},
         {"outcome", r->state == Lifecycle::done ? Json(to_string(r->done_kind)) : Json()},
         {"result", nullptr},
         {"compile_error", nullptr},
         {"compile_log", nullptr}};
  if (auto agg = state_.aggregate_of(*r)) {
    j["result"] = visible_result_json(*agg, state_.find_problem(s.problem_id)->problem, true);
  }
  if (r->state == Lifecycle::done && r->done_kind == DoneKind::compile_error) {
    j["compile_error"] = *r->judgement.compile_error;
    j["compile_log"] = r->judgement.compile_log;
  }
  return j;
}

Json JudgeService::leaderboard_json(const std::string& problem_id) const {
  std::shared_lock lock(mutex_);
  return scoring::leaderboard_json(state_.leaderboard(problem_id));
}

std::string JudgeService::replay_csv(const std::string& problem_id) const {
  std::shared_lock lock(mutex_);
  if (state_.find_problem(problem_id) == nullptr) throw UnknownProblem("unknown problem '" + problem_id + "'");
  return service::replay_csv(replay_contest(config_.journal_path(), problem_id));
}

ContestState JudgeService::state() const {
  std::shared_lock lock(mutex_);
  return state_;
}

bool JudgeService::wait_idle(std::chrono::milliseconds timeout) const {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (true) {
    {
      std::shared_lock lock(mutex_);
      bool busy = false;
      for (const auto& id : state_.arrival_order()) {
        if (state_.find_submission(id)->state != Lifecycle::done) {
          busy = true;
          break;
        }
      }
      if (!busy) return true;
    }
    if (std::chrono::steady_clock::now() >= deadline) return false;
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
}

}  // namespace judge::service

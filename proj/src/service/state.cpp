#include "judge/service/state.hpp"

#include <cstdio>
#include <set>

namespace judge::service {

namespace {

template <class T>
T field(const Json& body, const char* key) {
  try {
    return body.at(key).get<T>();
  } catch (const std::exception& e) {
    throw MalformedLog(std::string("event field '") + key + "': " + e.what());
  }
}

Json judgement_to_json(const eval::Judgement& j) {
  Json outcomes = Json::array();
  for (const auto& o : j.outcomes) outcomes.push_back(outcome_to_exact_json(o));
  return Json{{"compiled", j.compiled},
              {"compile_log", j.compile_log},
              {"compile_error", j.compile_error ? Json(*j.compile_error) : Json()},
              {"outcomes", std::move(outcomes)}};
}

eval::Judgement judgement_from_json(const Json& j) {
  eval::Judgement out;
  out.compiled = j.at("compiled").get<bool>();
  out.compile_log = j.at("compile_log").get<std::string>();
  if (!j.at("compile_error").is_null()) out.compile_error = j.at("compile_error").get<std::string>();
  out.outcomes = j.at("outcomes").get<std::vector<InstanceOutcome>>();
  return out;
}

Json best_to_json(const scoring::BestTable& t) {
  Json entries = Json::array();
  for (const auto& [id, e] : t.entries) {
    entries.push_back({{"instance_id", id}, {"score_exact", to_exact(e.score)}, {"submission_id", e.submission_id}});
  }
  return Json{{"direction", t.direction}, {"entries", std::move(entries)}};
}

scoring::BestTable best_from_json(const Json& j) {
  scoring::BestTable t;
  t.direction = j.at("direction").get<Direction>();
  for (const auto& e : j.at("entries")) {
    t.entries[e.at("instance_id").get<int>()] =
        scoring::BestEntry{rational_from_json(e.at("score_exact")), e.at("submission_id").get<std::string>()};
  }
  return t;
}

Json optional_int(const std::optional<std::int64_t>& v) { return v ? Json(*v) : Json(); }

std::optional<std::int64_t> int_or_null(const Json& j) {
  return j.is_null() ? std::nullopt : std::optional(j.get<std::int64_t>());
}

template <class E, std::size_t N>
E enum_named(const Json& j, const std::array<E, N>& all) {
  const auto name = j.get<std::string>();
  for (E e : all) {
    if (to_string(e) == name) return e;
  }
  throw FormatError("unknown name '" + name + "'");
}

/// Canonical aggregate without measured statistics.
Json stable_aggregate(const AggregateResult& r) {
  Json per = Json::array();
  for (auto o : r.per_instance) {
    o.stats.reset();
    per.push_back(outcome_to_exact_json(o));
  }
  return Json{{"status", r.status}, {"score_exact", to_exact(r.score)}, {"per_instance", std::move(per)}};
}

}  // namespace

std::string_view to_string(Lifecycle s) noexcept {
  switch (s) {
    case Lifecycle::queued: return "QUEUED";
    case Lifecycle::running: return "RUNNING";
    case Lifecycle::done: return "DONE";
  }
  return "?";
}

std::string_view to_string(DoneKind k) noexcept {
  switch (k) {
    case DoneKind::judged: return "judged";
    case DoneKind::compile_error: return "compile_error";
    case DoneKind::internal_error: return "internal_error";
  }
  return "?";
}

std::string submission_id_for(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "s%08zu", index);
  return buf;
}

Json event_to_json(const Event& e) {
  return Json{{"seq", e.seq}, {"at", e.at}, {"type", e.type}, {"body", e.body}};
}

Event event_from_json(const Json& j) {
  if (!j.is_object()) throw MalformedLog("event is not an object");
  Event e;
  e.seq = field<std::uint64_t>(j, "seq");
  e.at = field<std::int64_t>(j, "at");
  e.type = field<std::string>(j, "type");
  e.body = j.contains("body") ? j.at("body") : Json::object();
  if (!e.body.is_object()) throw MalformedLog("event body is not an object");
  return e;
}

Event problem_registered(const Problem& problem, const std::string& package_root) {
  return Event{0, 0, std::string(event::problem_registered), {{"problem", problem}, {"package_root", package_root}}};
}

Event submission_received(const Submission& submission) {
  return Event{0, 0, std::string(event::submission_received), {{"submission", submission}}};
}

Event submission_claimed(const std::string& submission_id) {
  return Event{0, 0, std::string(event::submission_claimed), {{"submission_id", submission_id}}};
}

Event submission_requeued(const std::string& submission_id, const std::string& reason) {
  return Event{0, 0, std::string(event::submission_requeued), {{"submission_id", submission_id}, {"reason", reason}}};
}

Event outcome_recorded(const std::string& submission_id, const eval::Judgement& judgement) {
  return Event{0, 0, std::string(event::outcome_recorded),
               {{"submission_id", submission_id}, {"judgement", judgement_to_json(judgement)}}};
}

Event submission_failed(const std::string& submission_id, const std::string& reason) {
  return Event{0, 0, std::string(event::submission_failed), {{"submission_id", submission_id}, {"reason", reason}}};
}

SubmissionRecord* ContestState::mutable_record(const std::string& id) {
  auto it = records_.find(id);
  return it == records_.end() ? nullptr : &it->second;
}

void ContestState::apply(const Event& e) {
  if (e.seq <= last_seq_) return;  // already applied
  last_seq_ = e.seq;
  const auto& b = e.body;

  if (e.type == event::problem_registered) {
    Problem p;
    try {
      p = b.at("problem").get<Problem>();
    } catch (const std::exception& ex) {
      throw MalformedLog(std::string("problem_registered: ") + ex.what());
    }
    if (problems_.contains(p.id)) return;
    ProblemEntry entry;
    entry.best = scoring::BestTable::for_problem(p);
    entry.package_root = field<std::string>(b, "package_root");
    entry.problem = std::move(p);
    problems_.emplace(entry.problem.id, std::move(entry));
    return;
  }

  if (e.type == event::submission_received) {
    Submission s;
    try {
      s = b.at("submission").get<Submission>();
    } catch (const std::exception& ex) {
      throw MalformedLog(std::string("submission_received: ") + ex.what());
    }
    if (records_.contains(s.id)) return;
    auto pit = problems_.find(s.problem_id);
    if (pit == problems_.end()) throw MalformedLog("submission " + s.id + " for unregistered problem " + s.problem_id);
    pit->second.submissions.push_back(s.id);
    SubmissionRecord r;
    r.received_at = e.at;
    r.submission = std::move(s);
    order_.push_back(r.submission.id);
    records_.emplace(r.submission.id, std::move(r));
    return;
  }

  const auto id = field<std::string>(b, "submission_id");
  SubmissionRecord* r = mutable_record(id);
  if (r == nullptr) throw MalformedLog(e.type + " for unknown submission " + id);

  if (e.type == event::submission_claimed) {
    if (r->state != Lifecycle::queued) return;
    r->state = Lifecycle::running;
    ++r->attempts;
    r->started_at = e.at;
  } else if (e.type == event::submission_requeued) {
    if (r->state != Lifecycle::running) return;
    r->state = Lifecycle::queued;
  } else if (e.type == event::outcome_recorded) {
    if (r->state == Lifecycle::done) return;
    eval::Judgement j;
    try {
      j = judgement_from_json(b.at("judgement"));
    } catch (const std::exception& ex) {
      throw MalformedLog(std::string("outcome_recorded: ") + ex.what());
    }
    r->state = Lifecycle::done;
    r->finished_at = e.at;
    r->done_kind = j.compile_error ? DoneKind::compile_error : DoneKind::judged;
    if (r->done_kind == DoneKind::judged) {
      auto& best = problems_.at(r->submission.problem_id).best;
      for (const auto& o : j.outcomes) scoring::update_best(best, o, id);
    }
    r->judgement = std::move(j);
  } else if (e.type == event::submission_failed) {
    if (r->state == Lifecycle::done) return;
    r->state = Lifecycle::done;
    r->finished_at = e.at;
    r->done_kind = DoneKind::internal_error;
    r->internal_error = field<std::string>(b, "reason");
  } else {
    throw MalformedLog("unknown event type '" + e.type + "'");
  }
}

const ProblemEntry* ContestState::find_problem(const std::string& id) const {
  auto it = problems_.find(id);
  return it == problems_.end() ? nullptr : &it->second;
}

const SubmissionRecord* ContestState::find_submission(const std::string& id) const {
  auto it = records_.find(id);
  return it == records_.end() ? nullptr : &it->second;
}

std::optional<std::string> ContestState::next_claimable() const {
  std::set<std::string> busy;
  for (const auto& [id, r] : records_) {
    if (r.state == Lifecycle::running) busy.insert(r.submission.user_id);
  }
  for (const auto& id : order_) {
    const auto& r = records_.at(id);
    if (r.state == Lifecycle::queued && !busy.contains(r.submission.user_id)) return id;
  }
  return std::nullopt;
}

std::vector<std::string> ContestState::running() const {
  std::vector<std::string> out;
  for (const auto& id : order_) {
    if (records_.at(id).state == Lifecycle::running) out.push_back(id);
  }
  return out;
}

std::optional<AggregateResult> ContestState::aggregate_of(const SubmissionRecord& r) const {
  if (r.state != Lifecycle::done || r.done_kind == DoneKind::internal_error) return std::nullopt;
  if (r.done_kind == DoneKind::compile_error) return scoring::compile_error_result(r.submission.id);
  const auto& entry = problems_.at(r.submission.problem_id);
  try {
    return scoring::aggregate(entry.problem, r.submission.id, r.judgement.outcomes, &entry.best);
  } catch (const DegenerateBest&) {
    // Only reachable with a zero objective; the score is then undefined.
    AggregateResult a;
    a.submission_id = r.submission.id;
    a.status = scoring::aggregate_status(r.judgement.outcomes, entry.problem.policy.re_priority);
    a.score = 0;
    a.per_instance = r.judgement.outcomes;
    return a;
  }
}

std::vector<scoring::LeaderboardEntry> ContestState::leaderboard(const std::string& problem_id) const {
  const auto* entry = find_problem(problem_id);
  if (entry == nullptr) throw UnknownProblem("unknown problem '" + problem_id + "'");
  std::vector<scoring::ScoredSubmission> scored;
  for (const auto& id : entry->submissions) {
    const auto& r = records_.at(id);
    if (r.state != Lifecycle::done || r.done_kind != DoneKind::judged) continue;
    scored.push_back({id, r.submission.user_id, r.submission.submitted_at, aggregate_of(r)->score});
  }
  return scoring::build_leaderboard(std::move(scored));
}

Json ContestState::to_json() const {
  Json problems = Json::array();
  for (const auto& [id, p] : problems_) {
    problems.push_back({{"problem", p.problem},
                        {"package_root", p.package_root},
                        {"best", best_to_json(p.best)},
                        {"submissions", p.submissions}});
  }
  Json subs = Json::array();
  for (const auto& id : order_) {
    const auto& r = records_.at(id);
    subs.push_back({{"submission", r.submission},
                    {"state", to_string(r.state)},
                    {"attempts", r.attempts},
                    {"received_at", r.received_at},
                    {"started_at", optional_int(r.started_at)},
                    {"finished_at", optional_int(r.finished_at)},
                    {"done_kind", to_string(r.done_kind)},
                    {"judgement", judgement_to_json(r.judgement)},
                    {"internal_error", r.internal_error}});
  }
  return Json{{"last_seq", last_seq_}, {"problems", std::move(problems)}, {"submissions", std::move(subs)}};
}

ContestState ContestState::from_json(const Json& j) {
  ContestState s;
  try {
    s.last_seq_ = j.at("last_seq").get<std::uint64_t>();
    for (const auto& p : j.at("problems")) {
      ProblemEntry e;
      e.problem = p.at("problem").get<Problem>();
      e.package_root = p.at("package_root").get<std::string>();
      e.best = best_from_json(p.at("best"));
      e.submissions = p.at("submissions").get<std::vector<std::string>>();
      s.problems_.emplace(e.problem.id, std::move(e));
    }
    for (const auto& rj : j.at("submissions")) {
      SubmissionRecord r;
      r.submission = rj.at("submission").get<Submission>();
      r.state = enum_named(rj.at("state"), std::array{Lifecycle::queued, Lifecycle::running, Lifecycle::done});
      r.attempts = rj.at("attempts").get<int>();
      r.received_at = rj.at("received_at").get<std::int64_t>();
      r.started_at = int_or_null(rj.at("started_at"));
      r.finished_at = int_or_null(rj.at("finished_at"));
      r.done_kind = enum_named(rj.at("done_kind"),
                               std::array{DoneKind::judged, DoneKind::compile_error, DoneKind::internal_error});
      r.judgement = judgement_from_json(rj.at("judgement"));
      r.internal_error = rj.at("internal_error").get<std::string>();
      s.order_.push_back(r.submission.id);
      s.records_.emplace(r.submission.id, std::move(r));
    }
  } catch (const JudgeError&) {
    throw;
  } catch (const std::exception& e) {
    throw MalformedLog(std::string("snapshot: ") + e.what());
  }
  return s;
}

Json ContestState::results_json() const {
  Json problems = Json::object();
  for (const auto& [id, p] : problems_) {
    Json board = scoring::leaderboard_json(leaderboard(id));
    for (auto& row : board) row.erase("submitted_at");
    problems[id] = {{"best", best_to_json(p.best)}, {"leaderboard", std::move(board)}};
  }
  Json subs = Json::array();
  for (const auto& id : order_) {
    const auto& r = records_.at(id);
    const auto agg = aggregate_of(r);
    subs.push_back({{"submission_id", id},
                    {"problem_id", r.submission.problem_id},
                    {"user_id", r.submission.user_id},
                    {"state", to_string(r.state)},
                    {"done_kind", r.state == Lifecycle::done ? Json(to_string(r.done_kind)) : Json()},
                    {"compile_error", r.judgement.compile_error ? Json(*r.judgement.compile_error) : Json()},
                    {"aggregate", agg ? stable_aggregate(*agg) : Json()}});
  }
  return Json{{"problems", std::move(problems)}, {"submissions", std::move(subs)}};
}

}  // namespace judge::service

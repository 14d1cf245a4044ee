#include "doctest.h"
#include "fixtures.hpp"

#include "judge/core/base64.hpp"
#include "judge/problem/facility.hpp"
#include "judge/problem/package.hpp"
#include "judge/service/http.hpp"
#include "judge/service/journal.hpp"
#include "judge/service/pipeline.hpp"
#include "judge/service/replay.hpp"
#include "judge/service/service.hpp"

#include <httplib.h>

#include <thread>

using namespace judge;
using namespace judge::service;
using judge::testing::read_file;
using judge::testing::write_file;

namespace fs = std::filesystem;

namespace {

const fs::path kProblems = fs::path(JUDGE_SOURCE_DIR) / "problems";
constexpr std::int64_t kDay = 86'400'000;
constexpr std::int64_t kT0 = 1'530'000'000'000;  // some midnight-free instant

fs::path fresh_dir(const std::string& name) {
  const auto p = judge::testing::scratch_parent() / ("svc-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ServiceConfig test_config(const std::string& name, int workers = 2) {
  ServiceConfig c;
  c.data_dir = fresh_dir(name);
  c.workers = workers;
  c.toolchains = fs::path(JUDGE_SOURCE_DIR) / "config/toolchains.json";
  c.admin_token = "secret";
  return c;
}

Payload source(const std::string& file, const std::string& language = "cpp") {
  return SourcePayload{language, {{"main.cpp", read_file(judge::testing::fixture_src("sources/" + file))}}};
}

Payload package_solution(const std::string& relative) {
  return SourcePayload{"cpp", {{"main.cpp", read_file(kProblems / relative)}}};
}

/// Hand-built journals for state and replay tests.
struct Log {
  std::vector<Event> events;
  std::uint64_t seq = 0;
  int submissions = 0;

  void add(Event e, std::int64_t at) {
    e.seq = ++seq;
    e.at = at;
    events.push_back(std::move(e));
  }

  /// A submission received at `at` and judged right away.
  std::string judged(const std::string& problem, const std::string& user, std::int64_t at,
                     const std::vector<std::pair<Status, long long>>& outcomes) {
    Submission s;
    s.id = submission_id_for(static_cast<std::size_t>(++submissions));
    s.problem_id = problem;
    s.user_id = user;
    s.payload = SourcePayload{"cpp", {{"main.cpp", "int main(){}"}}};
    s.submitted_at = at;
    add(submission_received(s), at);
    add(submission_claimed(s.id), at + 1);
    eval::Judgement j;
    j.compiled = true;
    int id = 0;
    for (auto [status, v] : outcomes) {
      InstanceOutcome o;
      o.instance_id = ++id;
      o.status = status;
      o.score = status == Status::ACC ? v : 0;
      j.outcomes.push_back(o);
    }
    add(outcome_recorded(s.id, j), at + 2);
    return s.id;
  }

  std::string compile_failed(const std::string& problem, const std::string& user, std::int64_t at) {
    Submission s;
    s.id = submission_id_for(static_cast<std::size_t>(++submissions));
    s.problem_id = problem;
    s.user_id = user;
    s.payload = SourcePayload{"cpp", {{"main.cpp", "oops"}}};
    s.submitted_at = at;
    add(submission_received(s), at);
    add(submission_claimed(s.id), at + 1);
    eval::Judgement j;
    j.compile_error = "compilation failed";
    add(outcome_recorded(s.id, j), at + 2);
    return s.id;
  }
};

Problem optimization_problem(const std::string& id, Direction direction, int instances) {
  Problem p;
  p.id = id;
  p.kind = ProblemKind::optimization;
  p.direction = direction;
  p.policy.kind = PolicyKind::optimization_normalized;
  p.checker = CheckerSpec{CheckerKind::objective, false, "facility", {}, {}};
  for (int i = 1; i <= instances; ++i) {
    TestInstance t;
    t.id = i;
    t.input = "1 1 3\n0 0 0\n1\n";
    t.max_points = 1;
    p.instances.push_back(t);
  }
  return p;
}

std::string ratio(const ReplayRow& r) { return r.best_ratio ? to_decimal(*r.best_ratio) : "-"; }

struct RunningServer {
  JudgeService service;
  HttpServer http;
  int port;
  std::thread thread;

  explicit RunningServer(ServiceConfig c)
      : service(std::move(c)), http(service), port(http.bind("127.0.0.1", 0)) {
    service.start();
    thread = std::thread([this] { http.serve(); });
  }
  ~RunningServer() {
    http.stop();
    thread.join();
    service.stop();
  }
};

Json poll_done(httplib::Client& client, const std::string& id) {
  for (int i = 0; i < 1500; ++i) {
    auto res = client.Get("/api/submissions/" + id);
    REQUIRE(res);
    auto j = Json::parse(res->body);
    if (j.at("state") == "DONE") return j;
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  FAIL("submission " << id << " never finished");
  return {};
}

}  // namespace

TEST_CASE("state applies events once") {
  Log log;
  const auto echo = problem::load_package(kProblems / "echo");
  log.add(problem_registered(echo, "/echo"), kT0);
  const auto id = log.judged("echo", "alice", kT0 + 10, {{Status::ACC, 40}, {Status::ACC, 60}});

  ContestState a;
  for (const auto& e : log.events) a.apply(e);
  ContestState b;
  for (const auto& e : log.events) {
    b.apply(e);
    b.apply(e);
  }
  CHECK(a.to_json() == b.to_json());
  const auto* r = a.find_submission(id);
  REQUIRE(r != nullptr);
  CHECK(r->state == Lifecycle::done);
  CHECK(r->attempts == 1);
  CHECK(a.aggregate_of(*r)->score == 100);

  // Out-of-lifecycle events are no-ops: a late outcome or requeue after done.
  Log extra = log;
  eval::Judgement other;
  other.compiled = true;
  extra.add(outcome_recorded(id, other), kT0 + 100);
  extra.add(submission_requeued(id, "late"), kT0 + 101);
  extra.add(submission_failed(id, "late"), kT0 + 102);
  ContestState c;
  for (const auto& e : extra.events) c.apply(e);
  CHECK(c.results_json() == a.results_json());

  Log bad;
  bad.add(submission_claimed("nobody"), kT0);
  ContestState d;
  CHECK_THROWS_AS(d.apply(bad.events[0]), MalformedLog);
}

TEST_CASE("claims respect one running submission per user") {
  Log log;
  log.add(problem_registered(problem::load_package(kProblems / "echo"), "/echo"), kT0);
  for (const char* user : {"alice", "alice", "bob"}) {
    Submission s;
    s.id = submission_id_for(static_cast<std::size_t>(++log.submissions));
    s.problem_id = "echo";
    s.user_id = user;
    s.payload = BinaryPayload{"x"};
    log.add(submission_received(s), kT0 + log.submissions);
  }
  ContestState st;
  for (const auto& e : log.events) st.apply(e);
  CHECK(st.next_claimable() == submission_id_for(1));
  log.add(submission_claimed(submission_id_for(1)), kT0 + 10);
  st.apply(log.events.back());
  CHECK(st.next_claimable() == submission_id_for(3));
  log.add(submission_requeued(submission_id_for(1), "fault"), kT0 + 11);
  st.apply(log.events.back());
  CHECK(st.next_claimable() == submission_id_for(1));
  CHECK(st.find_submission(submission_id_for(1))->attempts == 1);
}

TEST_CASE("journal persistence") {
  const auto dir = fresh_dir("journal");
  const auto file = dir / "journal.jsonl";
  Log log;
  log.add(problem_registered(problem::load_package(kProblems / "echo"), "/echo"), kT0);
  log.judged("echo", "alice", kT0 + 5, {{Status::ACC, 40}, {Status::WA, 0}});
  {
    Journal j(file);
    for (auto e : log.events) j.append(e, e.at);
    CHECK(j.last_seq() == log.events.size());
  }
  auto read = read_journal(file);
  REQUIRE(read.size() == log.events.size());
  for (std::size_t i = 0; i < read.size(); ++i) {
    CHECK(read[i].seq == i + 1);
    CHECK(event_to_json(read[i]) == event_to_json(log.events[i]));
  }

  // A torn final line is dropped and cut off on reopen.
  const auto intact = read_file(file);
  write_file(file, intact + R"({"seq": 99, "at": 1, "ty)");
  CHECK(read_journal(file).size() == log.events.size());
  {
    Journal j(file);
    CHECK(read_file(file) == intact);
    Event e = submission_failed(submission_id_for(1), "x");
    CHECK(j.append(e, kT0 + 50).seq == log.events.size() + 1);
  }
  CHECK(read_journal(file).size() == log.events.size() + 1);

  write_file(file, intact + "not json\n" + intact);
  CHECK_THROWS_AS(read_journal(file), MalformedLog);
  write_file(file, intact + intact);
  CHECK_THROWS_AS(read_journal(file), MalformedLog);
  CHECK_THROWS_AS(read_journal(dir / "missing.jsonl"), MalformedLog);
}

TEST_CASE("snapshot plus tail equals replay from empty") {
  const auto dir = fresh_dir("snapshot");
  Log log;
  log.add(problem_registered(optimization_problem("opt", Direction::minimize, 2), "/opt"), kT0);
  for (int i = 0; i < 12; ++i) {
    log.judged("opt", "u" + std::to_string(i % 4), kT0 + i * 1000,
               {{Status::ACC, 100 - i}, {i % 3 == 0 ? Status::TLE : Status::ACC, 50 + i}});
  }
  Journal j(dir / "journal.jsonl");
  ContestState live;
  for (std::size_t i = 0; i < log.events.size(); ++i) {
    live.apply(j.append(log.events[i], log.events[i].at));
    if (i == 17) write_snapshot(dir / "snapshot.json", live);
  }
  const auto recovered = recover(dir / "journal.jsonl", dir / "snapshot.json");
  const auto replayed = replay_from_empty(dir / "journal.jsonl");
  CHECK(recovered.to_json().dump() == live.to_json().dump());
  CHECK(replayed.to_json().dump() == live.to_json().dump());
  CHECK(ContestState::from_json(live.to_json()).to_json() == live.to_json());
}

TEST_CASE("config from environment and file") {
  auto c = load_config({{"JUDGE_PORT", "9001"},
                        {"JUDGE_DATA_DIR", "/tmp/d"},
                        {"JUDGE_WORKERS", "4"},
                        {"JUDGE_MAX_PARALLEL_RUNS", "3"}},
                       std::nullopt);
  CHECK(c.port == 9001);
  CHECK(c.data_dir == "/tmp/d");
  CHECK(c.workers == 4);
  CHECK(c.max_parallel_runs == 3);

  const auto dir = fresh_dir("config");
  write_file(dir / "c.json", R"({"port": 7000, "workers": 1, "problems": ["/a", "/b"], "max_source_bytes": 10})");
  c = load_config({{"JUDGE_PORT", "9001"}, {"JUDGE_WORKERS", "4"}, {"JUDGE_DATA_DIR", "/tmp/d"}}, dir / "c.json");
  CHECK(c.port == 7000);
  CHECK(c.workers == 1);
  CHECK(c.data_dir == "/tmp/d");
  CHECK(c.problems.size() == 2);
  CHECK(c.max_source_bytes == 10);

  CHECK_THROWS_AS(load_config({{"JUDGE_PORT", "http"}}, std::nullopt), FormatError);
  CHECK_THROWS_AS(load_config({{"JUDGE_WORKERS", "0"}}, std::nullopt), FormatError);
  write_file(dir / "bad.json", R"({"prot": 1})");
  CHECK_THROWS_AS(load_config({}, dir / "bad.json"), FormatError);
  CHECK_THROWS_AS(load_config({}, dir / "none.json"), FormatError);
}

TEST_CASE("replay examples") {
  const auto problem = optimization_problem("opt", Direction::minimize, 2);

  SUBCASE("a single winning submission gives ratio 1") {
    Log log;
    log.add(problem_registered(problem, "/opt"), kT0);
    log.judged("opt", "alice", kT0 + 5, {{Status::ACC, 10}, {Status::ACC, 20}});
    // Nothing happens for two days, then a failure.
    log.judged("opt", "bob", kT0 + 2 * kDay, {{Status::WA, 0}, {Status::ACC, 20}});
    const auto rows = replay_contest(log.events);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) CHECK(ratio(r) == "1.000000");
    CHECK(rows[1].correct + rows[1].incorrect == 0);
    CHECK(rows[1].users_total == 0);
  }

  SUBCASE("three improving submissions, replayed by hand") {
    Log log;
    log.add(problem_registered(problem, "/opt"), kT0);
    log.judged("opt", "alice", kT0, {{Status::ACC, 40}, {Status::ACC, 40}});         // mean 40
    log.judged("opt", "bob", kT0 + kDay, {{Status::ACC, 30}, {Status::ACC, 20}});    // mean 25
    log.judged("opt", "alice", kT0 + 2 * kDay, {{Status::ACC, 10}, {Status::ACC, 10}});  // mean 10
    const auto rows = replay_contest(log.events);
    REQUIRE(rows.size() == 3);
    CHECK(ratio(rows[0]) == "4.000000");
    CHECK(ratio(rows[1]) == "2.500000");
    CHECK(ratio(rows[2]) == "1.000000");
    CHECK(rows[0].users_new == 1);
    CHECK(rows[1].users_new == 1);
    CHECK(rows[2].users_new == 0);
    CHECK(rows[2].users_total == 1);
  }

  SUBCASE("one WA and one ACC on day 1") {
    Log log;
    log.add(problem_registered(problem, "/opt"), kT0);
    log.judged("opt", "alice", kT0, {{Status::WA, 0}, {Status::ACC, 5}});
    log.judged("opt", "alice", kT0 + 60'000, {{Status::ACC, 5}, {Status::ACC, 5}});
    log.compile_failed("opt", "bob", kT0 + 120'000);
    const auto rows = replay_contest(log.events);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].correct == 1);
    CHECK(rows[0].incorrect == 1);
    CHECK(rows[0].users_total == 2);
    CHECK(rows[0].users_new == 2);
    CHECK(replay_csv(rows) == "day,best_ratio,correct,incorrect,users_total,users_new\n1,1.000000,1,1,2,2\n");
  }

  SUBCASE("maximize orientation and missing winners") {
    Log log;
    log.add(problem_registered(optimization_problem("max", Direction::maximize, 1), "/max"), kT0);
    log.judged("max", "a", kT0, {{Status::RE, 0}});
    log.judged("max", "a", kT0 + kDay, {{Status::ACC, 5}});
    log.judged("max", "b", kT0 + 2 * kDay, {{Status::ACC, 20}});
    const auto rows = replay_contest(log.events);
    REQUIRE(rows.size() == 3);
    CHECK_FALSE(rows[0].best_ratio);
    CHECK(ratio(rows[1]) == "4.000000");
    CHECK(ratio(rows[2]) == "1.000000");
    CHECK(replay_csv(rows).find("\n1,,0,1,1,1\n") != std::string::npos);
  }

  SUBCASE("output limit is neither correct nor incorrect") {
    Log log;
    log.add(problem_registered(problem, "/opt"), kT0);
    log.judged("opt", "a", kT0, {{Status::OLE, 0}, {Status::ACC, 1}});
    log.judged("opt", "a", kT0 + 1000, {{Status::ACC, 1}, {Status::MLE, 0}});
    const auto rows = replay_contest(log.events);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].correct == 0);
    CHECK(rows[0].incorrect == 1);
  }

  SUBCASE("problem selection") {
    Log log;
    log.add(problem_registered(problem, "/opt"), kT0);
    log.add(problem_registered(optimization_problem("other", Direction::minimize, 1), "/o"), kT0);
    CHECK_THROWS_AS(replay_contest(log.events), InvalidRequest);
    CHECK_THROWS_AS(replay_contest(log.events, std::string("nope")), UnknownProblem);
    CHECK(replay_contest(log.events, std::string("other")).empty());
  }
}

TEST_CASE("replay plot") {
  Log log;
  log.add(problem_registered(optimization_problem("opt", Direction::minimize, 1), "/opt"), kT0);
  log.judged("opt", "a", kT0, {{Status::ACC, 9}});
  log.judged("opt", "b", kT0 + kDay, {{Status::WA, 0}});
  log.judged("opt", "b", kT0 + 2 * kDay, {{Status::ACC, 3}});
  const auto svg = replay_svg(replay_contest(log.events), "a <b> & c");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("#2ca02c") != std::string::npos);
  CHECK(svg.find("#d62728") != std::string::npos);
  CHECK(svg.find("a &lt;b&gt; &amp; c") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("service intake and judging") {
  auto config = test_config("intake");
  config.problems = {kProblems / "echo"};
  JudgeService svc(config);

  const auto id = svc.submit("echo", "alice", source("echo.cpp"));
  CHECK(Json(svc.submission_json(id)).at("state") == "QUEUED");
  CHECK_THROWS_AS(svc.submit("nope", "alice", source("echo.cpp")), UnknownProblem);
  CHECK_THROWS_AS(svc.submit("echo", "alice", SourcePayload{"cpp", {{"main.cpp", std::string(10 * kMiB, 'x')}}}),
                  PayloadTooLarge);
  CHECK_THROWS_AS(svc.submit("echo", "alice", source("echo.cpp", "cobol")), InvalidRequest);
  CHECK_THROWS_AS(svc.submission_json("s99999999"), UnknownSubmission);

  svc.start();
  REQUIRE(svc.wait_idle(std::chrono::seconds(120)));
  const auto view = svc.submission_json(id);
  CHECK(view.at("state") == "DONE");
  CHECK(view.at("outcome") == "judged");
  CHECK(view.at("result").at("status") == "ACC");
  CHECK(view.at("result").at("score") == "100.000000");
  CHECK(view.at("attempts") == 1);
  CHECK(view.at("result").at("per_instance").size() == 2);
  CHECK_FALSE(view.at("result").at("per_instance")[0].at("stats").is_null());

  // Journal replay reproduces the live state.
  CHECK(replay_from_empty(config.journal_path()).to_json().dump() == svc.state().to_json().dump());
}

TEST_CASE("two workers, three submissions") {
  auto config = test_config("workers");
  config.problems = {kProblems / "echo"};
  JudgeService svc(config);
  svc.start();
  std::vector<std::string> ids{svc.submit("echo", "a", source("echo.cpp")),
                               svc.submit("echo", "b", source("wrong.cpp")),
                               svc.submit("echo", "c", source("syntax_error.cpp"))};
  REQUIRE(svc.wait_idle(std::chrono::seconds(180)));
  const auto st = svc.state();
  CHECK(svc.submission_json(ids[0]).at("result").at("status") == "ACC");
  CHECK(svc.submission_json(ids[1]).at("result").at("status") == "WA");
  const auto ce = svc.submission_json(ids[2]);
  CHECK(ce.at("outcome") == "compile_error");
  CHECK(ce.at("result").at("status") == "CE");
  CHECK(ce.at("compile_log").get<std::string>().find("undeclared_identifier") != std::string::npos);
  for (const auto& id : ids) {
    const auto& outcomes = st.find_submission(id)->judgement.outcomes;
    for (std::size_t i = 0; i < outcomes.size(); ++i) CHECK(outcomes[i].instance_id == static_cast<int>(i + 1));
  }
  // The compile error is not ranked.
  const auto board = svc.leaderboard_json("echo");
  REQUIRE(board.size() == 2);
  CHECK(board[0].at("user_id") == "a");
  CHECK(board[1].at("user_id") == "b");
  CHECK(board[1].at("rank") == 2);
}

TEST_CASE("infrastructure faults are retried, then reported without charging the user") {
  auto config = test_config("retries", 1);
  config.problems = {kProblems / "echo"};
  JudgeService svc(config);
  std::atomic<int> calls{0};
  svc.set_claim_hook([&](const std::string& id, int attempt) {
    ++calls;
    if (id == submission_id_for(1) && attempt == 1) throw SandboxFault("injected");
    if (id == submission_id_for(2)) throw InfrastructureError("always broken");
  });
  const auto flaky = svc.submit("echo", "a", source("echo.cpp"));
  const auto broken = svc.submit("echo", "b", source("echo.cpp"));
  svc.start();
  REQUIRE(svc.wait_idle(std::chrono::seconds(120)));

  auto v = svc.submission_json(flaky);
  CHECK(v.at("attempts") == 2);
  CHECK(v.at("result").at("status") == "ACC");
  v = svc.submission_json(broken);
  CHECK(v.at("attempts") == config.max_attempts);
  CHECK(v.at("outcome") == "internal_error");
  CHECK(v.at("result").is_null());
  const auto board = svc.leaderboard_json("echo");
  REQUIRE(board.size() == 1);
  CHECK(board[0].at("user_id") == "a");
}

TEST_CASE("restart requeues work that was running") {
  auto config = test_config("restart", 1);
  config.problems = {kProblems / "echo"};
  {
    // A claim with no outcome, as if the process died mid-run.
    JudgeService svc(config);
    svc.submit("echo", "a", source("echo.cpp"));
    Journal j(config.journal_path());
    j.append(submission_claimed(submission_id_for(1)), now_ms());
  }
  JudgeService svc(config);
  CHECK(svc.submission_json(submission_id_for(1)).at("state") == "QUEUED");
  svc.start();
  REQUIRE(svc.wait_idle(std::chrono::seconds(60)));
  const auto v = svc.submission_json(submission_id_for(1));
  CHECK(v.at("attempts") == 2);
  CHECK(v.at("result").at("status") == "ACC");
  CHECK(recover(config.journal_path(), config.snapshot_path()).to_json() == svc.state().to_json());
}

TEST_CASE("a new best lowers other users' normalized scores") {
  // The facility pack without reference scores, so submissions set b_i.
  auto problem = problem::load_package(kProblems / "facility");
  for (auto& t : problem.instances) t.reference_score.reset();
  problem.id = "facility-open";
  const auto pkg = fresh_dir("facility-open-pkg");
  problem::write_package(problem, pkg);

  auto config = test_config("renormalize", 1);
  config.problems = {pkg};
  JudgeService svc(config);
  svc.start();
  const auto first = svc.submit("facility-open", "alice", package_solution("facility/solutions/corner.cpp"));
  REQUIRE(svc.wait_idle(std::chrono::seconds(120)));
  auto board = svc.leaderboard_json("facility-open");
  REQUIRE(board.size() == 1);
  CHECK(board[0].at("score") == "100.000000");

  svc.submit("facility-open", "bob", package_solution("facility/solutions/greedy.cpp"));
  REQUIRE(svc.wait_idle(std::chrono::seconds(120)));
  board = svc.leaderboard_json("facility-open");
  REQUIRE(board.size() == 2);
  CHECK(board[0].at("user_id") == "bob");
  CHECK(board[0].at("score") == "100.000000");
  CHECK(board[1].at("user_id") == "alice");
  CHECK(rational_from_json(board[1].at("score")) < 100);
  // Alice's own view reflects the same recomputation.
  CHECK(svc.submission_json(first).at("result").at("score") == board[1].at("score"));
}

TEST_CASE("HTTP API") {
  auto config = test_config("http");
  config.ui_dir = fs::path(JUDGE_SOURCE_DIR) / "ui";
  RunningServer server(config);
  httplib::Client client("127.0.0.1", server.port);

  auto res = client.Get("/api/problems");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(Json::parse(res->body) == Json::array());

  const std::string load = Json{{"path", (kProblems / "echo").string()}}.dump();
  res = client.Post("/api/problems", load, "application/json");
  CHECK(res->status == 403);
  res = client.Post("/api/problems", {{"X-Judge-Admin", "wrong"}}, load, "application/json");
  CHECK(res->status == 403);
  res = client.Post("/api/problems", {{"X-Judge-Admin", "secret"}}, load, "application/json");
  REQUIRE(res->status == 201);
  CHECK(Json::parse(res->body).at("problem_id") == "echo");
  res = client.Post("/api/problems", {{"X-Judge-Admin", "secret"}}, load, "application/json");
  CHECK(res->status == 409);

  const auto broken = fresh_dir("http-broken-pkg");
  fs::copy(kProblems / "echo", broken, fs::copy_options::recursive);
  fs::remove(broken / "tests/02.out");
  res = client.Post("/api/problems", {{"X-Judge-Admin", "secret"}}, Json{{"path", broken.string()}}.dump(),
                    "application/json");
  REQUIRE(res->status == 422);
  CHECK(Json::parse(res->body).at("diagnostics")[0].get<std::string>().find("tests/02.out") != std::string::npos);

  res = client.Get("/api/problems");
  auto list = Json::parse(res->body);
  REQUIRE(list.size() == 1);
  CHECK(list[0].at("instance_count") == 2);
  res = client.Get("/api/problems/echo");
  auto detail = Json::parse(res->body);
  CHECK(detail.at("statement").get<std::string>().rfind("# Echo", 0) == 0);
  CHECK(detail.at("instances")[1].at("max_points") == "60.000000");
  CHECK(detail.at("instances")[0].size() == 2);  // tests are never served
  CHECK(client.Get("/api/problems/nope")->status == 404);
  CHECK(Json::parse(client.Get("/api/problems/nope")->body).at("error") == "UnknownProblem");

  const auto src = read_file(judge::testing::fixture_src("sources/echo.cpp"));
  res = client.Post("/api/problems/echo/submissions",
                    Json{{"user_id", "alice"}, {"language_id", "cpp"}, {"source_b64", base64_encode(src)}}.dump(),
                    "application/json");
  REQUIRE(res->status == 202);
  const auto id = Json::parse(res->body).at("submission_id").get<std::string>();
  const auto view = poll_done(client, id);
  CHECK(view.at("result").at("status") == "ACC");
  CHECK(view.at("user_id") == "alice");

  res = client.Post("/api/problems/echo/submissions",
                    Json{{"user_id", "bob"},
                         {"language_id", "cpp"},
                         {"source_b64", base64_encode(std::string(10 * kMiB, ' '))}}
                        .dump(),
                    "application/json");
  CHECK(res->status == 413);
  CHECK(Json::parse(res->body).at("error") == "PayloadTooLarge");
  res = client.Post("/api/problems/nope/submissions",
                    Json{{"user_id", "bob"}, {"language_id", "cpp"}, {"source_b64", base64_encode(src)}}.dump(),
                    "application/json");
  CHECK(res->status == 404);
  res = client.Post("/api/problems/echo/submissions", "{", "application/json");
  CHECK(res->status == 400);
  res = client.Post("/api/problems/echo/submissions", Json{{"user_id", "bob"}, {"language_id", "cpp"}}.dump(),
                    "application/json");
  CHECK(res->status == 400);
  res = client.Post("/api/problems/echo/submissions",
                    Json{{"user_id", "bob"}, {"language_id", "cpp"}, {"source_b64", "@@@"}}.dump(),
                    "application/json");
  CHECK(res->status == 400);
  CHECK(client.Get("/api/submissions/s404")->status == 404);

  res = client.Get("/api/problems/echo/leaderboard");
  auto board = Json::parse(res->body);
  REQUIRE(board.size() == 1);
  CHECK(board[0].at("user_id") == "alice");
  CHECK(board[0].at("score") == "100.000000");
  CHECK(board[0].at("rank") == 1);
  CHECK(client.Get("/api/problems/nope/leaderboard")->status == 404);

  res = client.Get("/api/problems/echo/replay.csv");
  REQUIRE(res->status == 200);
  CHECK(res->get_header_value("Content-Type").find("text/csv") == 0);
  CHECK(res->body.rfind("day,best_ratio,correct,incorrect,users_total,users_new\n1,,1,0,1,1\n", 0) == 0);

  res = client.Get("/ui/index.html");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->get_header_value("Content-Type").find("text/html") == 0);
  CHECK(res->body == read_file(fs::path(JUDGE_SOURCE_DIR) / "ui/index.html"));
  CHECK(client.Get("/ui/../manifest.json")->status == 404);
}

TEST_CASE("service and local pipeline agree byte for byte") {
  auto config = test_config("agree", 1);
  config.problems = {kProblems / "echo"};
  JudgeService svc(config);
  svc.start();
  const auto id = svc.submit("echo", "u", source("wrong.cpp"));
  REQUIRE(svc.wait_idle(std::chrono::seconds(60)));
  auto served = svc.submission_json(id).at("result");
  for (auto& o : served.at("per_instance")) o["stats"] = nullptr;

  const auto problem = problem::load_package(kProblems / "echo");
  eval::ObjectiveRegistry objectives;
  const eval::Engine engine(judge::testing::shared_sandbox(), judge::testing::toolchains(), objectives);
  Submission s;
  s.id = id;
  s.payload = source("wrong.cpp");
  auto best = scoring::BestTable::for_problem(problem);
  const auto local = score_judgement(problem, best, id, engine.judge(s, engine.prepare(problem, kProblems / "echo")));
  CHECK(result_json(local).dump() == served.dump());
}

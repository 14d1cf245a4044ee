#include "doctest.h"
#include "fixtures.hpp"

#include "judge/core/error.hpp"
#include "judge/sandbox/sandbox.hpp"

#include <csignal>
#include <algorithm>
#include <chrono>
#include <numeric>
#include <thread>

#include <unistd.h>

using namespace judge;
using namespace judge::sandbox;
using judge::testing::fixture_artifact;
using judge::testing::shared_sandbox;

namespace {

EvalParams limits(std::int64_t time_ms, std::int64_t memory = 256 * kMiB,
                  std::int64_t output = 64 * kMiB) {
  EvalParams p;
  p.time_limit = time_ms;
  p.memory_limit = memory;
  p.output_limit = output;
  return p;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

}  // namespace

TEST_CASE("echo program copies its input") {
  const auto& box = shared_sandbox();
  auto raw = box.execute(fixture_artifact("echo"), "42\n", limits(2000));
  CHECK(raw.stdout_data == "42\n");
  CHECK(raw.limit_hits.empty());
  CHECK(raw.exit == ExitInfo::code(0));
  CHECK(classify(raw) == PreStatus::RAN_OK);
  CHECK(raw.stats.output_bytes == 3);
}

TEST_CASE("busy loop is stopped within 200 ms of the CPU limit") {
  const auto& box = shared_sandbox();
  for (std::int64_t limit : {300, 1000}) {
    CAPTURE(limit);
    auto raw = box.execute(fixture_artifact("busy_loop"), "", limits(limit));
    CHECK(raw.limit_hits.contains(Limit::cpu));
    CHECK(raw.stats.cpu_time >= limit);
    CHECK(raw.stats.cpu_time <= limit + 200);
    CHECK(classify(raw) == PreStatus::TLE);
  }
}

TEST_CASE("output beyond the limit is truncated to limit plus one sentinel byte") {
  const auto& box = shared_sandbox();
  const std::int64_t limit = kMiB;
  auto raw = box.execute(fixture_artifact("output_flood", {std::to_string(10 * kMiB)}), "",
                         limits(5000, 256 * kMiB, limit));
  CHECK(raw.limit_hits.contains(Limit::output));
  CHECK(static_cast<std::int64_t>(raw.stdout_data.size()) == limit + 1);
  CHECK(raw.stats.output_bytes > limit);
  CHECK(std::all_of(raw.stdout_data.begin(), raw.stdout_data.end(), [](char c) { return c == 'x'; }));
  CHECK(classify(raw) == PreStatus::OLE);
}

TEST_CASE("output exactly at the limit is accepted") {
  const auto& box = shared_sandbox();
  const std::int64_t limit = 100000;
  auto raw = box.execute(fixture_artifact("output_flood", {std::to_string(limit)}), "",
                         limits(5000, 256 * kMiB, limit));
  CHECK_FALSE(raw.limit_hits.contains(Limit::output));
  CHECK(static_cast<std::int64_t>(raw.stdout_data.size()) == limit);
  CHECK(classify(raw) == PreStatus::RAN_OK);
}

TEST_CASE("heap over-allocation is MLE") {
  const auto& box = shared_sandbox();
  auto raw = box.execute(fixture_artifact("memory_hog"), "", limits(10000, 64 * kMiB));
  CHECK(raw.limit_hits.contains(Limit::memory));
  CHECK(classify(raw) == PreStatus::MLE);
}

TEST_CASE("stack over-use is MLE") {
  const auto& box = shared_sandbox();
  auto raw = box.execute(fixture_artifact("stack_hog"), "", limits(10000, 64 * kMiB));
  CHECK(raw.limit_hits.contains(Limit::memory));
  CHECK(classify(raw) == PreStatus::MLE);
}

TEST_CASE("allocation under the limit is measured but not flagged") {
  const auto& box = shared_sandbox();
  auto raw = box.execute(fixture_artifact("memory_hog", {"32"}), "", limits(10000, 128 * kMiB));
  CHECK(trim(raw.stdout_data) == "done");
  CHECK(raw.limit_hits.empty());
  CHECK(raw.stats.peak_memory >= 32 * kMiB);
  CHECK(raw.stats.peak_memory <= 128 * kMiB);
}

TEST_CASE("crashes are RE") {
  const auto& box = shared_sandbox();
  auto segv = box.execute(fixture_artifact("crash", {"segv"}), "", limits(2000));
  CHECK(segv.exit == ExitInfo::signaled(SIGSEGV));
  CHECK(segv.limit_hits.empty());
  CHECK(classify(segv) == PreStatus::RE);

  auto code = box.execute(fixture_artifact("crash"), "", limits(2000));
  CHECK(code.exit == ExitInfo::code(3));
  CHECK(classify(code) == PreStatus::RE);
}

TEST_CASE("sleeping past the wall cap is TLE") {
  const auto& box = shared_sandbox();
  const auto started = std::chrono::steady_clock::now();
  auto raw = box.execute(fixture_artifact("sleeper", {"100000"}), "", limits(300));
  const auto elapsed = std::chrono::steady_clock::now() - started;
  CHECK(raw.limit_hits.contains(Limit::wall));
  CHECK_FALSE(raw.limit_hits.contains(Limit::cpu));
  CHECK(raw.stats.wall_time >= 600);
  CHECK(elapsed < std::chrono::seconds(5));
  CHECK(classify(raw) == PreStatus::TLE);
}

TEST_CASE("files outside the working directory are not reachable") {
  const auto& box = shared_sandbox();
  // A host file the test itself can read.
  auto secret_dir = ScratchDir::create(judge::testing::scratch_parent(), "secret-");
  const auto secret = secret_dir->path() / "secret.txt";
  judge::testing::write_file(secret, "top secret");
  REQUIRE(judge::testing::read_file(secret) == "top secret");

  auto raw = box.execute(fixture_artifact("probe_env", {"read", secret.string()}), "", limits(2000));
  CHECK(trim(raw.stdout_data) == "denied");

  auto shadow = box.execute(fixture_artifact("probe_env", {"read", "/etc/shadow"}), "", limits(2000));
  CHECK(trim(shadow.stdout_data) == "denied");

  auto write = box.execute(fixture_artifact("probe_env", {"write", "/usr/pwned"}), "", limits(2000));
  CHECK(trim(write.stdout_data) == "denied");

  auto local = box.execute(fixture_artifact("probe_env", {"write", "scratch.txt"}), "", limits(2000));
  CHECK(trim(local.stdout_data) == "ok");
}

TEST_CASE("fork bomb cannot exceed the task cap") {
  sandbox::SandboxConfig config;
  config.scratch_root = judge::testing::scratch_parent() / "sandbox-forks";
  config.max_tasks = 16;
  Sandbox box(config);
  auto raw = box.execute(fixture_artifact("fork_bomb"), "", limits(5000));
  const int forked = std::stoi(trim(raw.stdout_data).empty() ? "-1" : trim(raw.stdout_data));
  CHECK(forked >= 0);
  CHECK(forked < 16);
}

TEST_CASE("isolated runs drop privileges and network") {
  const auto& box = shared_sandbox();
  if (!box.isolated()) return;
  auto uid = box.execute(fixture_artifact("probe_env", {"uid"}), "", limits(2000));
  CHECK(trim(uid.stdout_data) == std::to_string(box.config().run_uid));
  auto net = box.execute(fixture_artifact("probe_env", {"net"}), "", limits(2000));
  CHECK(trim(net.stdout_data) == "denied");
}

TEST_CASE("seed and passthrough params arrive as JUDGE_ variables") {
  const auto& box = shared_sandbox();
  EvalParams p = limits(2000);
  p.rng_seed = 1234;
  p.passthrough = {{"time_limit", "2000"}, {"mode", "fast"}};
  auto seed = box.execute(fixture_artifact("probe_env", {"env", "JUDGE_SEED"}), "", p);
  CHECK(trim(seed.stdout_data) == "1234");
  auto tl = box.execute(fixture_artifact("probe_env", {"env", "JUDGE_TIME_LIMIT_MS"}), "", p);
  CHECK(trim(tl.stdout_data) == "2000");
  auto mode = box.execute(fixture_artifact("probe_env", {"env", "JUDGE_MODE"}), "", p);
  CHECK(trim(mode.stdout_data) == "fast");
  auto host = box.execute(fixture_artifact("probe_env", {"env", "USER"}), "", p);
  CHECK(trim(host.stdout_data) == "(unset)");
}

TEST_CASE("cpu time of a fixed workload is reproducible") {
  const auto& box = shared_sandbox();
  std::vector<double> times;
  for (int i = 0; i < 10; ++i) {
    auto raw = box.execute(fixture_artifact("cpu_burn", {"300"}), "", limits(2000));
    REQUIRE(trim(raw.stdout_data) == "done");
    times.push_back(static_cast<double>(raw.stats.cpu_time));
  }
  const auto [lo, hi] = std::minmax_element(times.begin(), times.end());
  const double mean = std::accumulate(times.begin(), times.end(), 0.0) / times.size();
  CAPTURE(*lo);
  CAPTURE(*hi);
  CHECK(*hi - *lo <= 0.10 * mean);
}

TEST_CASE("missing program is a sandbox fault") {
  const auto& box = shared_sandbox();
  RunSpec spec;
  spec.argv = {"/nonexistent/program"};
  CHECK_THROWS_AS(box.run(spec), SandboxFault);
}

TEST_CASE("parallel runs are capped") {
  sandbox::SandboxConfig config;
  config.scratch_root = judge::testing::scratch_parent() / "sandbox-serial";
  config.max_parallel_runs = 1;
  Sandbox box(config);
  const auto started = std::chrono::steady_clock::now();
  std::vector<std::thread> threads;
  std::vector<std::string> outputs(3);
  for (int i = 0; i < 3; ++i) {
    threads.emplace_back([&, i] {
      outputs[i] = box.execute(fixture_artifact("sleeper", {"300"}), "", limits(2000)).stdout_data;
    });
  }
  for (auto& t : threads) t.join();
  CHECK(std::chrono::steady_clock::now() - started >= std::chrono::milliseconds(900));
}

TEST_CASE("classification follows the precedence table for every input") {
  const std::vector<ExitInfo> exits{ExitInfo::code(0), ExitInfo::code(1), ExitInfo::signaled(SIGSEGV)};
  for (unsigned bits = 0; bits < 16; ++bits) {
    for (const auto& exit : exits) {
      RawRunResult raw;
      raw.limit_hits = LimitHits::from_bits(bits);
      raw.exit = exit;
      // Oracle: written out as a table independent of the implementation.
      PreStatus expected;
      if (bits & (1u | 8u)) {
        expected = PreStatus::TLE;
      } else if (bits & 2u) {
        expected = PreStatus::MLE;
      } else if (bits & 4u) {
        expected = PreStatus::OLE;
      } else if (!(exit.kind == ExitInfo::Kind::code && exit.value == 0)) {
        expected = PreStatus::RE;
      } else {
        expected = PreStatus::RAN_OK;
      }
      CAPTURE(bits);
      CHECK(classify(raw) == expected);
      CHECK(classify(raw) == classify(raw));
    }
  }
}

TEST_CASE("limit hit names") {
  LimitHits h{Limit::cpu, Limit::output};
  CHECK(h.names() == std::vector<std::string>{"cpu", "output"});
  CHECK(LimitHits::from_bits(h.bits()) == h);
}

TEST_CASE("this host runs isolated and metered") {
  // Root in a container with writable cgroups: the full mode must be active.
  const auto& box = shared_sandbox();
  if (::geteuid() != 0) return;
  CHECK(box.isolated());
  CHECK(box.uses_cgroups());
}

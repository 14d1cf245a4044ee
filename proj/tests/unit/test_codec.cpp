#include "doctest.h"

#include "judge/core/codec.hpp"

#include <random>

using namespace judge;

namespace {

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  long long integer(long long lo, long long hi) {
    return std::uniform_int_distribution<long long>(lo, hi)(rng);
  }
  bool coin() { return integer(0, 1) == 1; }
  std::string bytes(std::size_t max_len) {
    std::string s(static_cast<std::size_t>(integer(0, static_cast<long long>(max_len))), '\0');
    for (auto& c : s) c = static_cast<char>(integer(0, 255));
    return s;
  }
  std::string word() {
    std::string s(static_cast<std::size_t>(integer(1, 8)), 'a');
    for (auto& c : s) c = static_cast<char>('a' + integer(0, 25));
    return s;
  }
  Rational rational() { return Rational(integer(0, 1000000), integer(1, 1000)); }

  EvalParams params() {
    EvalParams p;
    p.time_limit = integer(1, 100000);
    p.memory_limit = integer(1, 1LL << 40);
    p.output_limit = integer(1, 1LL << 30);
    if (coin()) p.rng_seed = static_cast<std::uint64_t>(integer(0, 1LL << 62));
    for (int i = integer(0, 3); i > 0; --i) p.extra[word()] = word();
    for (const auto& [k, v] : p.extra) {
      if (coin()) p.passthrough.emplace_back(k, v);
    }
    return p;
  }

  Problem problem() {
    Problem p;
    p.id = word();
    p.kind = static_cast<ProblemKind>(integer(0, 2));
    p.direction = static_cast<Direction>(integer(0, 2));
    p.policy.kind = static_cast<PolicyKind>(integer(0, 3));
    p.policy.re_priority = coin();
    p.limits.compile_time = integer(1, 100000);
    p.limits.binary_size = integer(1, 1LL << 30);
    p.limits.time_limit = integer(1, 10000);
    p.statement = word();
    p.checker.kind = static_cast<CheckerKind>(integer(0, 2));
    // Canonical values only carry the fields of their kind.
    switch (p.checker.kind) {
      case CheckerKind::token_exact: p.checker.byte_exact = coin(); break;
      case CheckerKind::objective: p.checker.objective = word(); break;
      case CheckerKind::external:
        p.checker.source = word() + ".cpp";
        p.checker.language_id = word();
        break;
    }
    p.alphabet = coin() ? Alphabet::text() : Alphabet::custom(word());
    p.visibility.wa_detail = coin();
    if (coin()) p.visibility.instance_score = coin();
    for (int i = 1, n = static_cast<int>(integer(1, 4)); i <= n; ++i) {
      TestInstance t;
      t.id = i;
      t.input = bytes(64);
      if (coin()) t.reference_output = bytes(64);
      t.params = params();
      t.max_points = rational();
      if (coin()) t.reference_score = rational();
      p.instances.push_back(t);
    }
    return p;
  }

  ExecStats stats() {
    ExecStats s;
    s.cpu_time = integer(0, 100000);
    s.wall_time = integer(0, 100000);
    s.peak_memory = integer(0, 1LL << 40);
    s.output_bytes = integer(0, 1LL << 30);
    s.exit = coin() ? ExitInfo::code(static_cast<int>(integer(0, 255)))
                    : ExitInfo::signaled(static_cast<int>(integer(1, 31)));
    return s;
  }

  InstanceOutcome outcome() {
    InstanceOutcome o;
    o.instance_id = static_cast<int>(integer(1, 50));
    o.status = kInstanceStatuses[static_cast<std::size_t>(integer(0, kInstanceStatuses.size() - 1))];
    o.score = rational();
    if (coin()) o.stats = stats();
    if (coin()) o.detail = word();
    return o;
  }
};

template <class T>
T round_trip(const T& v) {
  return decode<T>(parse_json(Json(v).dump()));
}

}  // namespace

TEST_CASE("problems survive a JSON round trip") {
  Gen g(1);
  for (int i = 0; i < 300; ++i) {
    const Problem p = g.problem();
    REQUIRE(round_trip(p) == p);
  }
}

TEST_CASE("submissions survive a JSON round trip") {
  Gen g(2);
  for (int i = 0; i < 300; ++i) {
    Submission s;
    s.id = g.word();
    s.problem_id = g.word();
    s.user_id = g.word();
    s.submitted_at = g.integer(0, 1LL << 45);
    if (g.coin()) {
      s.payload = BinaryPayload{g.bytes(200)};
    } else {
      SourcePayload src{g.word(), {}};
      for (int k = g.integer(1, 3); k > 0; --k) src.files.push_back({g.word() + ".cpp", g.bytes(100)});
      s.payload = src;
    }
    REQUIRE(round_trip(s) == s);
  }
}

TEST_CASE("outcomes round trip exactly through the persistence encoding") {
  Gen g(3);
  for (int i = 0; i < 500; ++i) {
    const InstanceOutcome o = g.outcome();
    REQUIRE(decode<InstanceOutcome>(parse_json(outcome_to_exact_json(o).dump())) == o);
    // The user-facing encoding keeps six digits only.
    const Json user = o;
    CHECK(user["score"].get<std::string>() == to_decimal(o.score));
  }
}

TEST_CASE("aggregates and stats round trip") {
  Gen g(4);
  for (int i = 0; i < 200; ++i) {
    const ExecStats s = g.stats();
    REQUIRE(round_trip(s) == s);
    const EvalParams p = g.params();
    REQUIRE(round_trip(p) == p);
    AggregateResult a;
    a.submission_id = g.word();
    a.status = g.coin() ? Status::CE : Status::ACC;
    a.score = Rational(g.integer(0, 100000000), 1000000);
    for (int k = g.integer(0, 3); k > 0; --k) {
      auto o = g.outcome();
      o.score = Rational(g.integer(0, 1000000), 1000);
      a.per_instance.push_back(o);
    }
    REQUIRE(round_trip(a) == a);
  }
}

TEST_CASE("field names and encodings") {
  InstanceOutcome o;
  o.instance_id = 2;
  o.status = Status::TLE;
  o.score = Rational(1, 3);
  const Json j = o;
  CHECK(j.at("instance_id") == 2);
  CHECK(j.at("status") == "TLE");
  CHECK(j.at("score") == "0.333333");
  CHECK(j.at("stats").is_null());

  Submission s;
  s.payload = BinaryPayload{"\x7f" "ELF"};
  const Json sj = s;
  CHECK(sj.at("payload").at("static_binary") == "f0VMRg==");

  CHECK(Json(ExitInfo::signaled(9)) == Json::parse(R"({"signaled":9})"));
  CHECK(Json(ExitInfo::code(0)) == Json::parse(R"({"code":0})"));
}

TEST_CASE("malformed JSON is a format error") {
  CHECK_THROWS_AS(parse_json("{"), FormatError);
  CHECK_THROWS_AS(decode<Status>(Json("NOPE")), FormatError);
  CHECK_THROWS_AS(decode<Problem>(Json::parse(R"({"id": 3})")), FormatError);
}

#include "judge/core/codec.hpp"

#include "judge/core/base64.hpp"

namespace judge {

namespace {

template <class T>
Json optional_to_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

Json bytes_to_json(const Bytes& b) { return base64_encode(b); }

Bytes bytes_from_json(const Json& j) { return base64_decode(j.get<std::string>()); }

template <class E, std::size_t N>
E enum_from(const Json& j, const std::array<E, N>& values, std::string_view what) {
  const auto name = j.get<std::string>();
  for (E v : values) {
    if (to_string(v) == name) return v;
  }
  throw FormatError("unknown " + std::string(what) + " '" + name + "'");
}

const Json& require(const Json& j, const char* key) {
  if (!j.is_object()) throw FormatError(std::string("expected object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) throw FormatError(std::string("missing field '") + key + "'");
  return *it;
}

bool present(const Json& j, const char* key) {
  auto it = j.find(key);
  return it != j.end() && !it->is_null();
}

}  // namespace

Json rational_to_json(const Rational& v) { return to_exact(v); }

Rational rational_from_json(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_number()) return parse_rational(j.dump());
  throw FormatError("expected a number or numeric string, got " + j.dump());
}

void to_json(Json& j, Status s) { j = std::string(to_string(s)); }
void from_json(const Json& j, Status& s) {
  auto parsed = status_from_string(j.get<std::string>());
  if (!parsed) throw FormatError("unknown status " + j.dump());
  s = *parsed;
}

void to_json(Json& j, ProblemKind k) { j = std::string(to_string(k)); }
void from_json(const Json& j, ProblemKind& k) {
  k = enum_from(j, std::array{ProblemKind::decision, ProblemKind::search, ProblemKind::optimization},
                "problem kind");
}

void to_json(Json& j, Direction d) { j = std::string(to_string(d)); }
void from_json(const Json& j, Direction& d) {
  d = enum_from(j, std::array{Direction::maximize, Direction::minimize, Direction::none},
                "direction");
}

void to_json(Json& j, PolicyKind p) { j = std::string(to_string(p)); }
void from_json(const Json& j, PolicyKind& p) {
  p = enum_from(j,
                std::array{PolicyKind::binary_icpc, PolicyKind::ioi_sum,
                           PolicyKind::ioi_time_penalty, PolicyKind::optimization_normalized},
                "scoring policy");
}

void to_json(Json& j, CheckerKind c) { j = std::string(to_string(c)); }
void from_json(const Json& j, CheckerKind& c) {
  c = enum_from(j, std::array{CheckerKind::token_exact, CheckerKind::objective, CheckerKind::external},
                "checker kind");
}

void to_json(Json& j, const ScoringPolicy& v) {
  j = Json{{"kind", v.kind}, {"re_priority", v.re_priority}};
}
void from_json(const Json& j, ScoringPolicy& v) {
  v.kind = require(j, "kind").get<PolicyKind>();
  v.re_priority = j.value("re_priority", false);
}

void to_json(Json& j, const EvalParams& v) {
  Json passthrough = Json::array();
  for (const auto& [key, value] : v.passthrough) passthrough.push_back({{"key", key}, {"value", value}});
  j = Json{{"time_limit", v.time_limit},
           {"memory_limit", v.memory_limit},
           {"output_limit", v.output_limit},
           {"rng_seed", optional_to_json(v.rng_seed)},
           {"extra", v.extra},
           {"passthrough", passthrough}};
}
void from_json(const Json& j, EvalParams& v) {
  v.time_limit = require(j, "time_limit").get<std::int64_t>();
  v.memory_limit = require(j, "memory_limit").get<std::int64_t>();
  v.output_limit = require(j, "output_limit").get<std::int64_t>();
  v.rng_seed = present(j, "rng_seed") ? std::optional(j.at("rng_seed").get<std::uint64_t>())
                                      : std::nullopt;
  v.extra = j.value("extra", std::map<std::string, std::string>{});
  v.passthrough.clear();
  if (present(j, "passthrough")) {
    for (const auto& kv : j.at("passthrough")) {
      v.passthrough.emplace_back(require(kv, "key").get<std::string>(),
                                 require(kv, "value").get<std::string>());
    }
  }
}

void to_json(Json& j, const ResourceLimits& v) {
  j = Json{{"compile_time", v.compile_time}, {"binary_size", v.binary_size},
           {"time_limit", v.time_limit},     {"memory_limit", v.memory_limit},
           {"output_limit", v.output_limit}};
}
void from_json(const Json& j, ResourceLimits& v) {
  const ResourceLimits defaults;
  v.compile_time = j.value("compile_time", defaults.compile_time);
  v.binary_size = j.value("binary_size", defaults.binary_size);
  v.time_limit = j.value("time_limit", defaults.time_limit);
  v.memory_limit = j.value("memory_limit", defaults.memory_limit);
  v.output_limit = j.value("output_limit", defaults.output_limit);
}

void to_json(Json& j, const Alphabet& v) {
  if (v.name == "custom") {
    j = Json{{"chars", v.chars()}};
  } else {
    j = v.name;
  }
}
void from_json(const Json& j, Alphabet& v) {
  if (j.is_string()) {
    v = Alphabet::named(j.get<std::string>());
  } else {
    v = Alphabet::custom(require(j, "chars").get<std::string>());
  }
}

void to_json(Json& j, const CheckerSpec& v) {
  j = Json{{"kind", v.kind}};
  switch (v.kind) {
    case CheckerKind::token_exact:
      j["byte_exact"] = v.byte_exact;
      break;
    case CheckerKind::objective:
      j["objective"] = v.objective;
      break;
    case CheckerKind::external:
      j["source"] = v.source;
      j["language_id"] = v.language_id;
      break;
  }
}
void from_json(const Json& j, CheckerSpec& v) {
  v = CheckerSpec{};
  v.kind = require(j, "kind").get<CheckerKind>();
  v.byte_exact = j.value("byte_exact", false);
  v.objective = j.value("objective", std::string{});
  v.source = j.value("source", std::string{});
  v.language_id = j.value("language_id", std::string{});
}

void to_json(Json& j, const Visibility& v) {
  j = Json{{"instance_status", v.instance_status},
           {"instance_score", optional_to_json(v.instance_score)},
           {"wa_detail", v.wa_detail}};
}
void from_json(const Json& j, Visibility& v) {
  v.instance_status = j.value("instance_status", true);
  v.instance_score = present(j, "instance_score")
                         ? std::optional(j.at("instance_score").get<bool>())
                         : std::nullopt;
  v.wa_detail = j.value("wa_detail", false);
}

void to_json(Json& j, const TestInstance& v) {
  j = Json{{"id", v.id},
           {"input", bytes_to_json(v.input)},
           {"reference_output", v.reference_output ? bytes_to_json(*v.reference_output) : Json()},
           {"params", v.params},
           {"max_points", rational_to_json(v.max_points)},
           {"reference_score",
            v.reference_score ? rational_to_json(*v.reference_score) : Json()}};
}
void from_json(const Json& j, TestInstance& v) {
  v.id = require(j, "id").get<int>();
  v.input = bytes_from_json(require(j, "input"));
  v.reference_output = present(j, "reference_output")
                           ? std::optional(bytes_from_json(j.at("reference_output")))
                           : std::nullopt;
  v.params = require(j, "params").get<EvalParams>();
  v.max_points = rational_from_json(require(j, "max_points"));
  v.reference_score = present(j, "reference_score")
                          ? std::optional(rational_from_json(j.at("reference_score")))
                          : std::nullopt;
}

void to_json(Json& j, const Problem& v) {
  j = Json{{"id", v.id},
           {"kind", v.kind},
           {"direction", v.direction},
           {"instances", v.instances},
           {"policy", v.policy},
           {"limits", v.limits},
           {"statement", v.statement},
           {"checker", v.checker},
           {"alphabet", v.alphabet},
           {"visibility", v.visibility}};
}
void from_json(const Json& j, Problem& v) {
  v.id = require(j, "id").get<std::string>();
  v.kind = require(j, "kind").get<ProblemKind>();
  v.direction = require(j, "direction").get<Direction>();
  v.instances = require(j, "instances").get<std::vector<TestInstance>>();
  v.policy = require(j, "policy").get<ScoringPolicy>();
  v.limits = require(j, "limits").get<ResourceLimits>();
  v.statement = j.value("statement", std::string{});
  v.checker = present(j, "checker") ? j.at("checker").get<CheckerSpec>() : CheckerSpec{};
  v.alphabet = present(j, "alphabet") ? j.at("alphabet").get<Alphabet>() : Alphabet::digits();
  v.visibility = present(j, "visibility") ? j.at("visibility").get<Visibility>() : Visibility{};
}

void to_json(Json& j, const Submission& v) {
  Json payload;
  if (const auto* src = std::get_if<SourcePayload>(&v.payload)) {
    Json files = Json::array();
    for (const auto& f : src->files) files.push_back({{"name", f.name}, {"data", bytes_to_json(f.data)}});
    payload = {{"source", {{"language_id", src->language_id}, {"files", files}}}};
  } else {
    payload = {{"static_binary", bytes_to_json(std::get<BinaryPayload>(v.payload).data)}};
  }
  j = Json{{"id", v.id},
           {"problem_id", v.problem_id},
           {"user_id", v.user_id},
           {"payload", payload},
           {"submitted_at", v.submitted_at}};
}
void from_json(const Json& j, Submission& v) {
  v.id = require(j, "id").get<std::string>();
  v.problem_id = require(j, "problem_id").get<std::string>();
  v.user_id = require(j, "user_id").get<std::string>();
  v.submitted_at = require(j, "submitted_at").get<std::int64_t>();
  const Json& payload = require(j, "payload");
  if (present(payload, "source")) {
    const Json& src = payload.at("source");
    SourcePayload p;
    p.language_id = require(src, "language_id").get<std::string>();
    for (const auto& f : require(src, "files")) {
      p.files.push_back({require(f, "name").get<std::string>(), bytes_from_json(require(f, "data"))});
    }
    v.payload = std::move(p);
  } else if (present(payload, "static_binary")) {
    v.payload = BinaryPayload{bytes_from_json(payload.at("static_binary"))};
  } else {
    throw FormatError("payload must hold 'source' or 'static_binary'");
  }
}

void to_json(Json& j, const ExitInfo& v) {
  j = Json{{v.kind == ExitInfo::Kind::code ? "code" : "signaled", v.value}};
}
void from_json(const Json& j, ExitInfo& v) {
  if (present(j, "code")) {
    v = ExitInfo::code(j.at("code").get<int>());
  } else if (present(j, "signaled")) {
    v = ExitInfo::signaled(j.at("signaled").get<int>());
  } else {
    throw FormatError("exit must hold 'code' or 'signaled'");
  }
}

void to_json(Json& j, const ExecStats& v) {
  j = Json{{"cpu_time", v.cpu_time},
           {"wall_time", v.wall_time},
           {"peak_memory", v.peak_memory},
           {"output_bytes", v.output_bytes},
           {"exit", v.exit}};
}
void from_json(const Json& j, ExecStats& v) {
  v.cpu_time = require(j, "cpu_time").get<std::int64_t>();
  v.wall_time = require(j, "wall_time").get<std::int64_t>();
  v.peak_memory = require(j, "peak_memory").get<std::int64_t>();
  v.output_bytes = require(j, "output_bytes").get<std::int64_t>();
  v.exit = require(j, "exit").get<ExitInfo>();
}

void to_json(Json& j, const InstanceOutcome& v) {
  j = Json{{"instance_id", v.instance_id},
           {"status", v.status},
           {"score", to_decimal(v.score)},
           {"stats", optional_to_json(v.stats)},
           {"detail", optional_to_json(v.detail)}};
}
void from_json(const Json& j, InstanceOutcome& v) {
  v.instance_id = require(j, "instance_id").get<int>();
  v.status = require(j, "status").get<Status>();
  v.score = present(j, "score_exact") ? rational_from_json(j.at("score_exact"))
                                      : rational_from_json(require(j, "score"));
  v.stats = present(j, "stats") ? std::optional(j.at("stats").get<ExecStats>()) : std::nullopt;
  v.detail = present(j, "detail") ? std::optional(j.at("detail").get<std::string>()) : std::nullopt;
}

Json outcome_to_exact_json(const InstanceOutcome& v) {
  Json j = v;
  j["score_exact"] = to_exact(v.score);
  return j;
}

void to_json(Json& j, const AggregateResult& v) {
  j = Json{{"submission_id", v.submission_id},
           {"status", v.status},
           {"score", to_decimal(v.score)},
           {"per_instance", v.per_instance}};
}
void from_json(const Json& j, AggregateResult& v) {
  v.submission_id = require(j, "submission_id").get<std::string>();
  v.status = require(j, "status").get<Status>();
  v.score = present(j, "score_exact") ? rational_from_json(j.at("score_exact"))
                                      : rational_from_json(require(j, "score"));
  v.per_instance = require(j, "per_instance").get<std::vector<InstanceOutcome>>();
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace judge

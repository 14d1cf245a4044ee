#include "judge/eval/eval.hpp"

#include "judge/core/error.hpp"
#include "judge/core/scratch.hpp"

#include <csignal>
#include <cstring>
#include <fstream>
#include <sstream>

namespace judge::eval {

namespace fs = std::filesystem;

namespace {

bool is_separator(char c, bool csv) {
  return c == ' ' || c == '\n' || c == '\r' || c == '\t' || (csv && c == ',');
}

bool is_decimal(std::string_view s) {
  if (s.empty()) return false;
  bool digit = false, dot = false;
  for (char c : s) {
    if (c >= '0' && c <= '9') {
      digit = true;
    } else if (c == '.' && !dot) {
      dot = true;
    } else {
      return false;
    }
  }
  return digit;
}

std::string quote(std::string_view token) {
  constexpr std::size_t kMax = 32;
  std::string out(token.substr(0, kMax));
  if (token.size() > kMax) out += "...";
  return "'" + out + "'";
}

/// Why a run did not reach the checker.
std::string limit_detail(const sandbox::RawRunResult& raw, const EvalParams& params,
                         sandbox::PreStatus pre) {
  using sandbox::Limit;
  using sandbox::PreStatus;
  switch (pre) {
    case PreStatus::TLE:
      if (raw.limit_hits.contains(Limit::cpu)) {
        return "cpu time exceeds " + std::to_string(params.time_limit) + " ms";
      }
      return "wall time exceeds " + std::to_string(2 * params.time_limit) + " ms";
    case PreStatus::MLE:
      return "memory limit of " + std::to_string(params.memory_limit) + " bytes exceeded";
    case PreStatus::OLE:
      return "output exceeds " + std::to_string(params.output_limit) + " bytes";
    case PreStatus::RE:
      if (raw.exit.kind == ExitInfo::Kind::signaled) {
        const char* name = ::sigabbrev_np(raw.exit.value);
        return "killed by signal " + std::to_string(raw.exit.value) +
               (name ? std::string(" (SIG") + name + ")" : std::string());
      }
      return "exit code " + std::to_string(raw.exit.value);
    case PreStatus::RAN_OK:
      break;
  }
  return {};
}

Status status_of(sandbox::PreStatus pre) {
  switch (pre) {
    case sandbox::PreStatus::TLE: return Status::TLE;
    case sandbox::PreStatus::MLE: return Status::MLE;
    case sandbox::PreStatus::OLE: return Status::OLE;
    case sandbox::PreStatus::RE: return Status::RE;
    case sandbox::PreStatus::RAN_OK: return Status::ACC;
  }
  return Status::RE;
}

std::string token_mismatch(std::string_view output, std::string_view reference, bool csv) {
  const auto got = tokenize(output, csv);
  const auto want = tokenize(reference, csv);
  const std::size_t n = std::min(got.size(), want.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (got[i] != want[i]) {
      return "token " + std::to_string(i + 1) + ": expected " + quote(want[i]) + ", got " +
             quote(got[i]);
    }
  }
  return "expected " + std::to_string(want.size()) + " tokens, got " + std::to_string(got.size());
}

void write_bytes(const fs::path& p, std::string_view data) {
  std::ofstream out(p, std::ios::binary);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw InfrastructureError("cannot write " + p.string());
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InfrastructureError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<std::string_view> tokenize(std::string_view text, bool csv) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_separator(text[i], csv)) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_separator(text[i], csv)) ++i;
    if (i > start) out.push_back(text.substr(start, i - start));
  }
  return out;
}

bool check_tokens(std::string_view output, std::string_view reference, bool csv) {
  std::size_t a = 0, b = 0;
  // Streaming comparison; output may be large.
  for (;;) {
    while (a < output.size() && is_separator(output[a], csv)) ++a;
    while (b < reference.size() && is_separator(reference[b], csv)) ++b;
    if (a == output.size() || b == reference.size()) return a == output.size() && b == reference.size();
    while (a < output.size() && b < reference.size() && !is_separator(output[a], csv) &&
           !is_separator(reference[b], csv)) {
      if (output[a] != reference[b]) return false;
      ++a;
      ++b;
    }
    const bool end_a = a == output.size() || is_separator(output[a], csv);
    const bool end_b = b == reference.size() || is_separator(reference[b], csv);
    if (end_a != end_b) return false;
  }
}

Rational score_ioi(Status status, const Rational& max_points) {
  return status == Status::ACC ? max_points : Rational(0);
}

Rational score_time_penalty(const Rational& max_points, std::int64_t time_limit, std::int64_t tau) {
  if (time_limit <= 0) throw BoundsError("time limit must be positive");
  if (tau < 0 || tau > time_limit) throw BoundsError("tau must lie in [0, time limit]");
  const Rational factor(2 * (time_limit - tau), time_limit);
  return max_points * (factor < 1 ? factor : Rational(1));
}

void ObjectiveRegistry::add(std::string name, ObjectiveFn fn) { fns_[std::move(name)] = std::move(fn); }

const ObjectiveFn* ObjectiveRegistry::find(std::string_view name) const noexcept {
  auto it = fns_.find(name);
  return it == fns_.end() ? nullptr : &it->second;
}

ObjectiveResult check_objective(const ObjectiveRegistry& registry, std::string_view output,
                                const TestInstance& instance, const Problem& problem) {
  const auto* fn = registry.find(problem.checker.objective);
  if (fn == nullptr) {
    throw InfrastructureError("no objective registered under '" + problem.checker.objective + "'");
  }
  return (*fn)(output, instance, problem);
}

CheckerVerdict parse_checker_output(std::string_view text) {
  const std::string_view line = text.substr(0, text.find('\n'));
  std::istringstream in{std::string(line)};
  std::string head;
  in >> head;
  CheckerVerdict v;
  if (head == "OK") {
    v.ok = true;
  } else if (head != "WA") {
    throw FormatError("checker output must start with OK or WA, got '" + std::string(line) + "'");
  }
  std::string next;
  const auto before = in.tellg();
  if (in >> next) {
    if (is_decimal(next)) {
      v.score = parse_rational(next);
    } else {
      in.clear();
      in.seekg(before);
    }
  }
  std::string rest;
  std::getline(in, rest);
  const auto first = rest.find_first_not_of(" \t");
  v.detail = first == std::string::npos ? std::string() : rest.substr(first);
  while (!v.detail.empty() && (v.detail.back() == '\r' || v.detail.back() == ' ')) v.detail.pop_back();
  return v;
}

Engine::Engine(const sandbox::Sandbox& sandbox, const compile::ToolchainRegistry& toolchains,
               const ObjectiveRegistry& objectives, compile::CompileContext compile_context)
    : sandbox_(&sandbox),
      toolchains_(&toolchains),
      objectives_(&objectives),
      compile_context_(std::move(compile_context)) {
  if (compile_context_.sandbox == nullptr) compile_context_.sandbox = sandbox_;
}

PreparedProblem Engine::prepare(Problem problem, const fs::path& package_root) const {
  PreparedProblem out;
  if (problem.checker.kind == CheckerKind::external) {
    Submission s;
    s.id = "checker:" + problem.id;
    s.payload = SourcePayload{problem.checker.language_id,
                              {{fs::path(problem.checker.source).filename().string(),
                                read_bytes(package_root / problem.checker.source)}}};
    ResourceLimits limits = problem.limits;
    limits.compile_time = std::max<std::int64_t>(limits.compile_time, 60'000);
    try {
      out.checker = compile::build(s, *toolchains_, limits, compile_context_);
    } catch (const compile::CompileError& e) {
      throw InfrastructureError("checker of problem '" + problem.id + "' does not build: " + e.what() +
                                "\n" + e.log());
    }
  }
  out.problem = std::move(problem);
  return out;
}

std::string Engine::run_checker(const Artifact& checker, const TestInstance& instance,
                                const std::string& output) const {
  auto work = ScratchDir::create(sandbox_->config().scratch_root, "check-");
  const fs::path box = work->path() / "box";
  fs::create_directories(box);
  write_bytes(box / "input.txt", instance.input);
  write_bytes(box / "output.txt", output);
  write_bytes(box / "answer.txt", instance.reference_output.value_or(""));

  const sandbox::BindMount sol{checker.path.parent_path(), "/checker"};
  const std::string bin = sandbox_->bind_path(sol, checker.path.filename().string());
  const std::string view = sandbox_->box_path(box);
  sandbox::RunSpec spec;
  for (const auto& arg : checker.run_command) {
    std::string a = arg;
    if (auto pos = a.find("{bin_path}"); pos != std::string::npos) a.replace(pos, 10, bin);
    spec.argv.push_back(std::move(a));
  }
  spec.argv.push_back(view + "/input.txt");
  spec.argv.push_back(view + "/output.txt");
  spec.argv.push_back(view + "/answer.txt");
  spec.box = box;
  spec.binds.push_back(sol);
  spec.cpu_limit_ms = instance.params.time_limit;
  spec.wall_limit_ms = 2 * instance.params.time_limit;
  spec.memory_limit = instance.params.memory_limit;
  spec.output_limit = 64 * kKiB;
  const auto raw = sandbox_->run(spec);
  if (sandbox::classify(raw) != sandbox::PreStatus::RAN_OK) {
    throw InfrastructureError("checker failed on instance " + std::to_string(instance.id) + ": " +
                              std::string(sandbox::to_string(sandbox::classify(raw))) + " " +
                              raw.stderr_data.substr(0, 512));
  }
  return raw.stdout_data;
}

InstanceOutcome Engine::evaluate_instance(const Artifact& artifact, const TestInstance& instance,
                                          const PreparedProblem& prepared) const {
  const Problem& problem = prepared.problem;
  const auto raw = sandbox_->execute(artifact, instance.input, instance.params);
  InstanceOutcome out;
  out.instance_id = instance.id;
  out.stats = raw.stats;
  out.score = 0;

  const auto pre = sandbox::classify(raw);
  if (pre != sandbox::PreStatus::RAN_OK) {
    out.status = status_of(pre);
    out.detail = limit_detail(raw, instance.params, pre);
    return out;
  }

  Rational objective = 0;
  bool accepted = false;
  switch (problem.checker.kind) {
    case CheckerKind::token_exact: {
      const auto& reference = instance.reference_output.value();
      accepted = problem.checker.byte_exact ? raw.stdout_data == reference
                                            : check_tokens(raw.stdout_data, reference, problem.alphabet.csv);
      if (!accepted) {
        out.detail = problem.checker.byte_exact ? "output differs from reference byte-for-byte"
                                                : token_mismatch(raw.stdout_data, reference,
                                                                 problem.alphabet.csv);
      }
      break;
    }
    case CheckerKind::objective: {
      const auto r = check_objective(*objectives_, raw.stdout_data, instance, problem);
      accepted = r.feasible;
      objective = r.objective;
      if (!r.detail.empty()) out.detail = r.detail;
      break;
    }
    case CheckerKind::external: {
      if (!prepared.checker) throw InfrastructureError("external checker was not prepared");
      CheckerVerdict verdict;
      try {
        verdict = parse_checker_output(run_checker(*prepared.checker, instance, raw.stdout_data));
      } catch (const FormatError& e) {
        throw InfrastructureError(std::string("checker protocol violation: ") + e.what());
      }
      accepted = verdict.ok;
      if (!verdict.detail.empty()) out.detail = verdict.detail;
      if (accepted && problem.policy.kind == PolicyKind::optimization_normalized) {
        if (!verdict.score) throw InfrastructureError("checker accepted without a score");
        objective = *verdict.score;
      }
      break;
    }
  }

  out.status = accepted ? Status::ACC : Status::WA;
  switch (problem.policy.kind) {
    case PolicyKind::binary_icpc:
      out.score = 0;
      break;
    case PolicyKind::ioi_sum:
      out.score = score_ioi(out.status, instance.max_points);
      break;
    case PolicyKind::ioi_time_penalty:
      out.score = accepted ? score_time_penalty(instance.max_points, instance.params.time_limit,
                                                std::min(raw.stats.cpu_time, instance.params.time_limit))
                           : Rational(0);
      break;
    case PolicyKind::optimization_normalized:
      out.score = accepted ? objective : Rational(0);
      break;
  }
  return out;
}

Judgement Engine::judge(const Submission& submission, const PreparedProblem& prepared) const {
  Judgement j;
  std::optional<Artifact> artifact;
  try {
    artifact = compile::build(submission, *toolchains_, prepared.problem.limits, compile_context_);
  } catch (const compile::CompileError& e) {
    j.compile_error = e.what();
    j.compile_log = e.log();
    return j;
  }
  j.compiled = true;
  j.compile_log = artifact->compile_log;
  for (const auto& instance : prepared.problem.instances) {
    j.outcomes.push_back(evaluate_instance(*artifact, instance, prepared));
  }
  return j;
}

}  // namespace judge::eval

#pragma once

#include "judge/compile/artifact.hpp"
#include "judge/compile/compile.hpp"
#include "judge/core/model.hpp"
#include "judge/sandbox/sandbox.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace judge::eval {

/// Whitespace-token equality ("1 2\n3\n" equals "1 2 3"). In csv mode
/// commas separate tokens too.
bool check_tokens(std::string_view output, std::string_view reference, bool csv = false);

/// Tokens of `text` under the same splitting rules.
std::vector<std::string_view> tokenize(std::string_view text, bool csv = false);

/// V_i on ACC, 0 otherwise.
Rational score_ioi(Status status, const Rational& max_points);

/// Time-penalized points: V · min(1, 2(T − τ)/T). Requires 0 ≤ τ ≤ T and T > 0.
Rational score_time_penalty(const Rational& max_points, std::int64_t time_limit, std::int64_t tau);

struct ObjectiveResult {
  bool feasible = false;
  Rational objective = 0;
  std::string detail;
};

/// Parses a contestant's output and scores it. Garbled output must come
/// back infeasible with a detail, never as an exception.
using ObjectiveFn =
    std::function<ObjectiveResult(std::string_view output, const TestInstance&, const Problem&)>;

class ObjectiveRegistry {
 public:
  void add(std::string name, ObjectiveFn fn);
  const ObjectiveFn* find(std::string_view name) const noexcept;

 private:
  std::map<std::string, ObjectiveFn, std::less<>> fns_;
};

/// Runs the problem's registered objective. InfrastructureError when the
/// name is unknown.
ObjectiveResult check_objective(const ObjectiveRegistry& registry, std::string_view output,
                                const TestInstance& instance, const Problem& problem);

/// One line from an external checker: `OK [score] [detail]` or
/// `WA [detail]`.
struct CheckerVerdict {
  bool ok = false;
  std::optional<Rational> score;
  std::string detail;
};

/// FormatError when the first line does not follow the protocol.
CheckerVerdict parse_checker_output(std::string_view text);

/// A problem ready for judging: its definition plus the compiled external
/// checker when it has one.
struct PreparedProblem {
  Problem problem;
  std::optional<Artifact> checker;
};

/// Result of the compile + per-instance evaluation steps for one
/// submission. Aggregation happens in the scoring module.
struct Judgement {
  bool compiled = false;
  std::string compile_log;
  /// Set when compilation failed (the submission is CE).
  std::optional<std::string> compile_error;
  std::vector<InstanceOutcome> outcomes;
};

class Engine {
 public:
  Engine(const sandbox::Sandbox& sandbox, const compile::ToolchainRegistry& toolchains,
         const ObjectiveRegistry& objectives, compile::CompileContext compile_context = {});

  /// Builds the external checker of `problem` if it declares one; the
  /// checker source is read relative to `package_root`.
  PreparedProblem prepare(Problem problem, const std::filesystem::path& package_root) const;

  /// E(b, t_i) → (s_i, v_i, e_i). v_i follows the policy; under
  /// optimization_normalized it is the raw objective value, normalized
  /// later against the best table. InfrastructureError on judge faults.
  InstanceOutcome evaluate_instance(const Artifact& artifact, const TestInstance& instance,
                                    const PreparedProblem& problem) const;

  /// Compile, then every instance in order.
  Judgement judge(const Submission& submission, const PreparedProblem& problem) const;

  const sandbox::Sandbox& sandbox() const noexcept { return *sandbox_; }

 private:
  std::string run_checker(const Artifact& checker, const TestInstance& instance,
                          const std::string& output) const;

  const sandbox::Sandbox* sandbox_;
  const compile::ToolchainRegistry* toolchains_;
  const ObjectiveRegistry* objectives_;
  compile::CompileContext compile_context_;
};

}  // namespace judge::eval

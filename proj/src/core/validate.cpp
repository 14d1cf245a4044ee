#include "judge/core/validate.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

namespace judge {

namespace {

std::string hex_byte(unsigned char c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "0x%02x", c);
  return buf;
}

bool is_declared(const EvalParams& p, const std::string& key) {
  return std::find(kBuiltinParamNames.begin(), kBuiltinParamNames.end(), key) !=
             kBuiltinParamNames.end() ||
         p.extra.contains(key);
}

}  // namespace

std::vector<std::string> validate_params(const EvalParams& params, const std::string& where) {
  std::vector<std::string> out;
  if (params.time_limit <= 0) out.push_back(where + "time_limit must be > 0");
  if (params.memory_limit <= 0) out.push_back(where + "memory_limit must be > 0");
  if (params.output_limit <= 0) out.push_back(where + "output_limit must be > 0");
  for (const auto& [key, value] : params.passthrough) {
    if (!is_declared(params, key)) {
      out.push_back(where + "passthrough key '" + key + "' is not a declared parameter");
    }
  }
  return out;
}

std::vector<std::string> validate_problem(const Problem& problem) {
  std::vector<std::string> out;
  if (problem.id.empty()) out.push_back("id: must be non-empty");

  const bool optimization = problem.kind == ProblemKind::optimization;
  if (optimization && problem.direction == Direction::none) {
    out.push_back("direction required for optimization");
  }
  if (!optimization && problem.direction != Direction::none) {
    out.push_back("direction must be none for " + std::string(to_string(problem.kind)) +
                  " problems");
  }
  if (problem.policy.kind == PolicyKind::optimization_normalized && !optimization) {
    out.push_back("policy: optimization_normalized requires kind optimization");
  }

  const auto& l = problem.limits;
  if (l.compile_time <= 0) out.push_back("limits.compile_time must be > 0");
  if (l.binary_size <= 0) out.push_back("limits.binary_size must be > 0");
  if (l.time_limit <= 0) out.push_back("limits.time_limit must be > 0");
  if (l.memory_limit <= 0) out.push_back("limits.memory_limit must be > 0");
  if (l.output_limit <= 0) out.push_back("limits.output_limit must be > 0");

  switch (problem.checker.kind) {
    case CheckerKind::token_exact:
      break;
    case CheckerKind::objective:
      if (!optimization) out.push_back("checker: objective requires kind optimization");
      if (problem.checker.objective.empty()) out.push_back("checker.objective: name required");
      break;
    case CheckerKind::external:
      if (problem.checker.source.empty()) out.push_back("checker.source: required for external");
      if (problem.checker.language_id.empty()) {
        out.push_back("checker.language_id: required for external");
      }
      break;
  }

  if (problem.instances.empty()) out.push_back("instances: must be non-empty");

  std::set<int> seen;
  std::set<int> reported;
  for (const auto& inst : problem.instances) {
    const std::string where = "instance " + std::to_string(inst.id) + ": ";
    if (inst.id < 1) out.push_back(where + "id must be >= 1");
    if (!seen.insert(inst.id).second && reported.insert(inst.id).second) {
      out.push_back("instances: duplicate id " + std::to_string(inst.id));
    }
    auto params = validate_params(inst.params, where + "params.");
    out.insert(out.end(), params.begin(), params.end());

    if (inst.max_points < 0) out.push_back(where + "max_points must be >= 0");
    if (inst.max_points == 0 && problem.policy.kind != PolicyKind::binary_icpc) {
      out.push_back(where + "max_points = 0 is permitted only under binary_icpc");
    }
    if (inst.reference_score && *inst.reference_score <= 0 &&
        problem.policy.kind == PolicyKind::optimization_normalized) {
      out.push_back(where + "reference_score must be > 0 for normalized scoring");
    }
    if (problem.checker.kind == CheckerKind::token_exact && !inst.reference_output) {
      out.push_back(where + "token_exact checker requires a reference output");
    }
    if (auto pos = problem.alphabet.first_violation(inst.input)) {
      out.push_back(where + "input byte " + hex_byte(static_cast<unsigned char>(inst.input[*pos])) +
                    " at offset " + std::to_string(*pos) + " is outside alphabet '" +
                    problem.alphabet.name + "'");
    }
    if (inst.reference_output) {
      if (auto pos = problem.alphabet.first_violation(*inst.reference_output)) {
        out.push_back(where + "reference output byte " +
                      hex_byte(static_cast<unsigned char>((*inst.reference_output)[*pos])) +
                      " at offset " + std::to_string(*pos) + " is outside alphabet '" +
                      problem.alphabet.name + "'");
      }
    }
  }
  return out;
}

}  // namespace judge

#pragma once

#include "judge/core/model.hpp"

#include <string>
#include <vector>

namespace judge {

/// Every broken invariant of `problem`, one human-readable line each naming
/// the field and the rule. Empty means the problem is well-formed; downstream
/// modules rely on that without re-checking.
std::vector<std::string> validate_problem(const Problem& problem);

/// Violations of a single parameter set; `where` prefixes each message.
std::vector<std::string> validate_params(const EvalParams& params, const std::string& where);

}  // namespace judge

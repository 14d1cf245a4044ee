#pragma once

#include "judge/core/model.hpp"

#include <filesystem>

namespace judge::problem {

/// Reads a problem package:
///
///   manifest.json        id, kind, direction, policy, limits, checker,
///                        alphabet, visibility, per-instance metadata
///   statement.md
///   tests/NN.in          NN zero-padded, contiguous from 01
///   tests/NN.out         required for token_exact, absent for objective
///   tests/NN.params.json overrides on top of the manifest limits
///
/// Instance bytes are kept exactly as stored. PackageMalformed lists every
/// problem found, each naming the file it concerns.
Problem load_package(const std::filesystem::path& root);

/// Writes `problem` back out in the same layout (used by pack generators).
/// Parameters equal to the limit defaults are not written.
void write_package(const Problem& problem, const std::filesystem::path& root);

}  // namespace judge::problem

#pragma once

#include "judge/core/scratch.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace judge {

/// The solution b: an executable (or an interpreted script) plus the
/// command used to start it.
struct Artifact {
  std::shared_ptr<ScratchDir> storage;
  /// Host path of the executable or script; lives inside `storage`.
  std::filesystem::path path;
  std::string language_id;
  std::int64_t size = 0;
  std::string compile_log;
  /// Argument vector with a `{bin_path}` placeholder.
  std::vector<std::string> run_command{"{bin_path}"};
};

}  // namespace judge

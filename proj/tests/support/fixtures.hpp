#pragma once

#include "judge/compile/artifact.hpp"
#include "judge/compile/compile.hpp"
#include "judge/core/scratch.hpp"
#include "judge/sandbox/sandbox.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace judge::testing {

inline std::filesystem::path fixture_bin(const std::string& name) {
  return std::filesystem::path(JUDGE_FIXTURE_BIN_DIR) / name;
}

inline std::filesystem::path fixture_src(const std::string& relative) {
  return std::filesystem::path(JUDGE_FIXTURE_SRC_DIR) / relative;
}

inline std::filesystem::path scratch_parent() {
  auto p = std::filesystem::temp_directory_path() / "judge-tests";
  std::filesystem::create_directories(p);
  return p;
}

/// Copies a prebuilt fixture program into a private directory so the
/// sandbox can bind it.
inline Artifact fixture_artifact(const std::string& name, std::vector<std::string> args = {}) {
  Artifact a;
  a.storage = ScratchDir::create(scratch_parent(), "artifact-");
  a.path = a.storage->path() / name;
  std::filesystem::copy_file(fixture_bin(name), a.path);
  a.size = static_cast<std::int64_t>(std::filesystem::file_size(a.path));
  a.language_id = "native";
  a.run_command = {"{bin_path}"};
  for (auto& arg : args) a.run_command.push_back(std::move(arg));
  return a;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& data) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << data;
}

/// One sandbox shared by a test binary.
inline const sandbox::Sandbox& shared_sandbox() {
  static const sandbox::Sandbox box([] {
    sandbox::SandboxConfig c;
    c.scratch_root = scratch_parent() / "sandbox";
    return c;
  }());
  return box;
}

inline const compile::ToolchainRegistry& toolchains() {
  static const auto r = compile::ToolchainRegistry::load(JUDGE_SOURCE_DIR "/config/toolchains.json");
  return r;
}

/// A single-file source submission built from tests/fixtures/sources.
inline Submission source_submission(const std::string& language, const std::string& file,
                                    const std::string& id = "s1") {
  Submission s;
  s.id = id;
  s.problem_id = "p";
  s.user_id = "u";
  s.payload = SourcePayload{language, {{file, read_file(fixture_src("sources/" + file))}}};
  return s;
}

}  // namespace judge::testing

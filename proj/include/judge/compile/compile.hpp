#pragma once

#include "judge/compile/artifact.hpp"
#include "judge/core/error.hpp"
#include "judge/core/model.hpp"
#include "judge/sandbox/sandbox.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace judge::compile {

/// Failure attributable to the submission; its aggregate status is CE.
class CompileError : public JudgeError {
 public:
  CompileError(const std::string& what, std::string log = {})
      : JudgeError(what), log_(std::move(log)) {}
  const std::string& log() const noexcept { return log_; }

 private:
  std::string log_;
};

class CompileDiagnostics : public CompileError {
 public:
  using CompileError::CompileError;
};

class CompileTimeout : public CompileError {
 public:
  using CompileError::CompileError;
};

class BinaryTooLarge : public CompileError {
 public:
  using CompileError::CompileError;
};

class MissingDependency : public CompileError {
 public:
  explicit MissingDependency(std::string library)
      : CompileError("missing shared library: " + library), library_(std::move(library)) {}
  const std::string& library() const noexcept { return library_; }

 private:
  std::string library_;
};

class IncompatibleArchitecture : public CompileError {
 public:
  using CompileError::CompileError;
};

/// Language id not present in the registry.
class UnknownLanguage : public CompileError {
 public:
  using CompileError::CompileError;
};

/// How to build and start programs of one language.
///
/// compile_command placeholders: {src_dir}, {out_path}, and an argument that
/// is exactly {sources}, which expands to one argument per submitted file.
/// run_command must contain {bin_path}. Interpreted toolchains may omit
/// {out_path}: the artifact is then the entry source file itself.
struct Toolchain {
  std::string language_id;
  std::vector<std::string> compile_command;
  std::vector<std::string> run_command{"{bin_path}"};
  bool is_interpreted = false;
  /// File name given to a single-file submission; also the entry point of
  /// interpreted programs.
  std::string source_name = "main";
  std::int64_t memory_limit = 2 * kGiB;

  friend bool operator==(const Toolchain&, const Toolchain&) = default;
};

/// Violations of the placeholder rules, one line each.
std::vector<std::string> validate_toolchain(const Toolchain& t);

class ToolchainRegistry {
 public:
  ToolchainRegistry() = default;
  explicit ToolchainRegistry(std::vector<Toolchain> toolchains);

  /// Reads a JSON list of toolchain records. Throws FormatError.
  static ToolchainRegistry load(const std::filesystem::path& file);
  static ToolchainRegistry parse(std::string_view json_text);
  /// JUDGE_TOOLCHAINS when set, else the file installed with the build.
  static std::filesystem::path default_path();

  const Toolchain* find(std::string_view language_id) const noexcept;
  const Toolchain& at(std::string_view language_id) const;  // UnknownLanguage
  std::vector<std::string> languages() const;

 private:
  std::map<std::string, Toolchain, std::less<>> by_id_;
};

struct CompileContext {
  const sandbox::Sandbox* sandbox = nullptr;
  /// Where artifacts are stored; defaults to the sandbox scratch root.
  std::filesystem::path artifact_root;
};

inline constexpr std::int64_t kCompileLogCap = 64 * kKiB;
inline constexpr std::string_view kTruncationMarker = "\n[compile log truncated at 65536 bytes]\n";

/// Builds a source submission inside the sandbox. CPU and wall time are both
/// capped at limits.compile_time.
Artifact compile(const Submission& submission, const Toolchain& toolchain,
                 const ResourceLimits& limits, const CompileContext& ctx);

/// The machine and library search path programs are run against.
struct BinaryEnvironment {
  std::uint16_t machine = 0;  // ELF e_machine
  std::vector<std::filesystem::path> library_dirs;

  /// This host: its machine type, the default search directories and
  /// everything listed in /etc/ld.so.conf.
  static BinaryEnvironment host();
};

/// Accepts a submitted executable whose architecture matches and whose
/// dynamic dependencies (if any) all resolve.
Artifact verify_binary(const Submission& submission, const ResourceLimits& limits,
                       const CompileContext& ctx,
                       const BinaryEnvironment& env = BinaryEnvironment::host());

/// compile or verify_binary depending on the payload.
Artifact build(const Submission& submission, const ToolchainRegistry& registry,
               const ResourceLimits& limits, const CompileContext& ctx);

/// Parsed ELF facts used by verify_binary; exposed for tests.
struct ElfInfo {
  bool is_64 = false;
  std::uint16_t machine = 0;
  std::uint16_t type = 0;
  std::optional<std::string> interpreter;
  std::vector<std::string> needed;
  std::vector<std::string> search_paths;  // RPATH / RUNPATH entries
};

/// Throws FormatError when `data` is not a well-formed ELF file.
ElfInfo parse_elf(std::string_view data);

}  // namespace judge::compile

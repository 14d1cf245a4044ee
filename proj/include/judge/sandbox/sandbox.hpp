#pragma once

#include "judge/compile/artifact.hpp"
#include "judge/core/model.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace judge::sandbox {

enum class Limit : unsigned { cpu = 1u << 0, memory = 1u << 1, output = 1u << 2, wall = 1u << 3 };

/// Subset of {cpu, memory, output, wall}.
class LimitHits {
 public:
  constexpr LimitHits() = default;
  constexpr LimitHits(std::initializer_list<Limit> limits) {
    for (Limit l : limits) set(l);
  }

  constexpr void set(Limit l) noexcept { bits_ |= static_cast<unsigned>(l); }
  constexpr bool contains(Limit l) const noexcept { return (bits_ & static_cast<unsigned>(l)) != 0; }
  constexpr bool empty() const noexcept { return bits_ == 0; }
  constexpr unsigned bits() const noexcept { return bits_; }
  static constexpr LimitHits from_bits(unsigned bits) noexcept {
    LimitHits h;
    h.bits_ = bits & 0xfu;
    return h;
  }
  std::vector<std::string> names() const;

  friend constexpr bool operator==(LimitHits, LimitHits) = default;

 private:
  unsigned bits_ = 0;
};

struct RawRunResult {
  ExecStats stats;
  /// At most output_limit + 1 bytes; the extra byte marks an overflow.
  Bytes stdout_data;
  /// Capped, diagnostic only.
  Bytes stderr_data;
  LimitHits limit_hits;
  ExitInfo exit;
};

/// Verdict derived from resource usage alone, before any output check.
enum class PreStatus { TLE, MLE, OLE, RE, RAN_OK };

std::string_view to_string(PreStatus s) noexcept;

/// Precedence TLE > MLE > OLE > RE; RAN_OK only for a clean exit with no
/// limit hit. Wall-clock overruns count as TLE.
PreStatus classify(const RawRunResult& raw) noexcept;

/// Read-only bind of a host directory into the sandbox view.
struct BindMount {
  std::filesystem::path host;
  std::string target;
};

/// A single process launch. `argv` and paths in it refer to the sandbox
/// view: use Sandbox::box_path / bind_path to build them.
struct RunSpec {
  std::vector<std::string> argv;
  /// KEY=VALUE entries appended to the base environment.
  std::vector<std::string> env;
  Bytes stdin_data;
  /// Host directory exposed read-write as the working directory. Created
  /// per run when empty.
  std::filesystem::path box;
  std::vector<BindMount> binds;

  std::int64_t cpu_limit_ms = 1000;
  std::int64_t wall_limit_ms = 2000;
  std::int64_t memory_limit = 256 * kMiB;
  std::int64_t output_limit = 64 * kMiB;
  std::int64_t tmp_size = 64 * kMiB;
  std::optional<int> max_tasks;
  /// Send stderr into the stdout capture (compiler logs).
  bool merge_stderr = false;
  /// When false, stdout beyond output_limit + 1 is discarded instead of
  /// stopping the child.
  bool kill_on_output_limit = true;
};

enum class Isolation { automatic, namespaces, none };

struct SandboxConfig {
  std::filesystem::path scratch_root;  // default: <tmp>/judge-sandbox
  Isolation isolation = Isolation::automatic;
  bool use_cgroups = true;
  /// Upper bound on concurrently running children across all callers.
  int max_parallel_runs = 0;  // 0: hardware concurrency
  int max_tasks = 64;
  unsigned run_uid = 65534;
  unsigned run_gid = 65534;
  /// Host paths visible (read-only) inside the sandbox.
  std::vector<std::string> system_paths{"/usr",     "/bin",  "/lib",
                                        "/lib64",   "/lib32", "/libx32",
                                        "/sbin",    "/etc/alternatives",
                                        "/etc/ld.so.cache"};
  std::int64_t stderr_cap = 64 * kKiB;
  std::int64_t file_size_limit = 512 * kMiB;
  std::chrono::milliseconds poll_interval{5};
};

/// Runs untrusted programs under CPU, memory, output and task limits.
///
/// With root privileges the child gets fresh mount/pid/net/ipc/uts
/// namespaces, a chroot holding only the system paths plus its box, and an
/// unprivileged uid. CPU and memory are metered through per-run cgroup v1
/// groups when the hierarchy is writable; otherwise rlimits and /proc
/// polling are used. Safe to share between threads.
class Sandbox {
 public:
  explicit Sandbox(SandboxConfig config = {});
  ~Sandbox();
  Sandbox(const Sandbox&) = delete;
  Sandbox& operator=(const Sandbox&) = delete;

  RawRunResult run(const RunSpec& spec) const;

  /// Runs `artifact` on `input` under `params` (wall cap: 2 x time limit).
  /// Passthrough params reach the child as JUDGE_* environment variables.
  RawRunResult execute(const Artifact& artifact, const Bytes& input,
                       const EvalParams& params) const;

  bool isolated() const noexcept;
  bool uses_cgroups() const noexcept;
  const SandboxConfig& config() const noexcept;

  /// Path under which `host_box` appears to the child.
  std::string box_path(const std::filesystem::path& host_box) const;
  /// Path under which a bind mount (or one file in it) appears to the child.
  std::string bind_path(const BindMount& bind, const std::string& file = {}) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// JUDGE_* variables for passthrough params (and JUDGE_SEED).
std::vector<std::string> solution_environment(const EvalParams& params);

}  // namespace judge::sandbox

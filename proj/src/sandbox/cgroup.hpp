#pragma once

#include <sys/types.h>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace judge::sandbox {

/// Locations of the cgroup v1 controllers this process may create children
/// under. Empty paths mean the controller is unavailable.
struct CgroupRoots {
  std::filesystem::path memory;
  std::filesystem::path cpuacct;
  std::filesystem::path pids;

  bool usable() const { return !memory.empty() && !cpuacct.empty(); }

  /// Discovers controller mounts and this process' own group in each, and
  /// checks that a child group can be created.
  static CgroupRoots discover();
};

/// One per-run group in each available controller; removed on destruction
/// after killing whatever is left inside.
class RunCgroup {
 public:
  RunCgroup(const CgroupRoots& roots, const std::string& name);
  ~RunCgroup();
  RunCgroup(const RunCgroup&) = delete;
  RunCgroup& operator=(const RunCgroup&) = delete;

  void limit_memory(std::int64_t bytes);
  void limit_tasks(int count);
  void attach(pid_t pid);

  std::int64_t cpu_ns() const;
  std::int64_t peak_memory() const;
  std::int64_t oom_kills() const;
  void kill_all() const;

 private:
  std::filesystem::path memory_;
  std::filesystem::path cpuacct_;
  std::filesystem::path pids_;
};

}  // namespace judge::sandbox

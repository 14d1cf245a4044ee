#include "cgroup.hpp"

#include "judge/core/error.hpp"

#include <signal.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>
#include <thread>
#include <vector>

namespace judge::sandbox {

namespace fs = std::filesystem;

namespace {

std::set<std::string> split_csv(const std::string& s) {
  std::set<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.insert(item);
  return out;
}

/// Mount point of the v1 hierarchy carrying `controller`.
fs::path mount_point(const std::string& controller) {
  std::ifstream mounts("/proc/self/mounts");
  std::string device, dir, type, options, rest;
  while (mounts >> device >> dir >> type >> options) {
    std::getline(mounts, rest);
    if (type == "cgroup" && split_csv(options).contains(controller)) return dir;
  }
  return {};
}

/// This process' group path inside the hierarchy carrying `controller`.
std::string own_group(const std::string& controller) {
  std::ifstream in("/proc/self/cgroup");
  std::string line;
  while (std::getline(in, line)) {
    const auto a = line.find(':');
    const auto b = line.find(':', a + 1);
    if (a == std::string::npos || b == std::string::npos) continue;
    if (split_csv(line.substr(a + 1, b - a - 1)).contains(controller)) return line.substr(b + 1);
  }
  return {};
}

fs::path writable_root(const std::string& controller) {
  const fs::path mount = mount_point(controller);
  if (mount.empty()) return {};
  const std::string own = own_group(controller);
  fs::path root = mount / fs::path(own).relative_path();
  const fs::path probe = root / ("judge-probe-" + std::to_string(::getpid()));
  std::error_code ec;
  if (!fs::create_directory(probe, ec) || ec) return {};
  fs::remove(probe, ec);
  return root;
}

void write_file(const fs::path& p, const std::string& value) {
  std::ofstream out(p);
  out << value;
  out.flush();
  if (!out) throw SandboxFault("cannot write '" + value + "' to " + p.string());
}

std::int64_t read_number(const fs::path& p) {
  std::ifstream in(p);
  std::int64_t v = 0;
  in >> v;
  return v;
}

void kill_tasks(const fs::path& group) {
  std::ifstream in(group / "cgroup.procs");
  pid_t pid = 0;
  while (in >> pid) ::kill(pid, SIGKILL);
}

void remove_group(const fs::path& p) {
  if (p.empty()) return;
  // rmdir fails with EBUSY until the last task is gone.
  for (int attempt = 0; attempt < 200; ++attempt) {
    if (::rmdir(p.c_str()) == 0 || errno == ENOENT) return;
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
}

fs::path make_group(const fs::path& root, const std::string& name) {
  if (root.empty()) return {};
  fs::path p = root / name;
  std::error_code ec;
  if (!fs::create_directory(p, ec) && !ec) {
    // Left over from an earlier process with the same pid.
    kill_tasks(p);
    remove_group(p);
    fs::create_directory(p, ec);
  }
  if (ec) throw SandboxFault("cannot create cgroup " + p.string() + ": " + ec.message());
  return p;
}

/// Groups named judge-<pid>-<n> whose owner is gone (killed before it could
/// clean up).
void sweep_stale(const fs::path& root) {
  if (root.empty()) return;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(root, ec)) {
    const std::string name = entry.path().filename().string();
    if (!entry.is_directory(ec) || name.rfind("judge-", 0) != 0) continue;
    const auto dash = name.find('-', 6);
    if (dash == std::string::npos) continue;
    const std::string owner = name.substr(6, dash - 6);
    if (owner.empty() || owner.find_first_not_of("0123456789") != std::string::npos) continue;
    if (fs::exists(fs::path("/proc") / owner, ec)) continue;
    kill_tasks(entry.path());
    remove_group(entry.path());
  }
}

}  // namespace

CgroupRoots CgroupRoots::discover() {
  CgroupRoots roots;
  roots.memory = writable_root("memory");
  roots.cpuacct = writable_root("cpuacct");
  roots.pids = writable_root("pids");
  for (const auto& root : {roots.memory, roots.cpuacct, roots.pids}) sweep_stale(root);
  return roots;
}

RunCgroup::RunCgroup(const CgroupRoots& roots, const std::string& name)
    : memory_(make_group(roots.memory, name)),
      cpuacct_(make_group(roots.cpuacct, name)),
      pids_(make_group(roots.pids, name)) {}

RunCgroup::~RunCgroup() {
  kill_all();
  remove_group(memory_);
  remove_group(cpuacct_);
  remove_group(pids_);
}

void RunCgroup::limit_memory(std::int64_t bytes) {
  if (memory_.empty()) return;
  write_file(memory_ / "memory.limit_in_bytes", std::to_string(bytes));
  std::error_code ec;
  if (fs::exists(memory_ / "memory.memsw.limit_in_bytes", ec)) {
    std::ofstream(memory_ / "memory.memsw.limit_in_bytes") << bytes;
  }
}

void RunCgroup::limit_tasks(int count) {
  if (pids_.empty()) return;
  write_file(pids_ / "pids.max", std::to_string(count));
}

void RunCgroup::attach(pid_t pid) {
  for (const auto& group : {memory_, cpuacct_, pids_}) {
    if (!group.empty()) write_file(group / "cgroup.procs", std::to_string(pid));
  }
}

std::int64_t RunCgroup::cpu_ns() const {
  return cpuacct_.empty() ? 0 : read_number(cpuacct_ / "cpuacct.usage");
}

std::int64_t RunCgroup::peak_memory() const {
  return memory_.empty() ? 0 : read_number(memory_ / "memory.max_usage_in_bytes");
}

std::int64_t RunCgroup::oom_kills() const {
  if (memory_.empty()) return 0;
  std::ifstream in(memory_ / "memory.oom_control");
  std::string key;
  std::int64_t value = 0;
  while (in >> key >> value) {
    if (key == "oom_kill") return value;
  }
  return 0;
}

void RunCgroup::kill_all() const {
  for (const auto& group : {pids_, memory_, cpuacct_}) {
    if (!group.empty()) kill_tasks(group);
  }
}

}  // namespace judge::sandbox

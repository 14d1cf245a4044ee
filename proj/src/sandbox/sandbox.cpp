#include "judge/sandbox/sandbox.hpp"

#include "cgroup.hpp"
#include "judge/core/error.hpp"
#include "judge/core/scratch.hpp"

#include <fcntl.h>
#include <grp.h>
#include <poll.h>
#include <sched.h>
#include <signal.h>
#include <sys/mman.h>
#include <sys/mount.h>
#include <sys/prctl.h>
#include <sys/resource.h>
#include <sys/stat.h>
#include <sys/syscall.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <limits>
#include <sstream>
#include <atomic>
#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <fstream>
#include <mutex>
#include <thread>

namespace judge::sandbox {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

std::vector<std::string> LimitHits::names() const {
  std::vector<std::string> out;
  if (contains(Limit::cpu)) out.emplace_back("cpu");
  if (contains(Limit::memory)) out.emplace_back("memory");
  if (contains(Limit::output)) out.emplace_back("output");
  if (contains(Limit::wall)) out.emplace_back("wall");
  return out;
}

std::string_view to_string(PreStatus s) noexcept {
  switch (s) {
    case PreStatus::TLE: return "TLE";
    case PreStatus::MLE: return "MLE";
    case PreStatus::OLE: return "OLE";
    case PreStatus::RE: return "RE";
    case PreStatus::RAN_OK: return "RAN_OK";
  }
  return "?";
}

PreStatus classify(const RawRunResult& raw) noexcept {
  const auto& hits = raw.limit_hits;
  if (hits.contains(Limit::cpu) || hits.contains(Limit::wall)) return PreStatus::TLE;
  if (hits.contains(Limit::memory)) return PreStatus::MLE;
  if (hits.contains(Limit::output)) return PreStatus::OLE;
  if (!raw.exit.clean()) return PreStatus::RE;
  return PreStatus::RAN_OK;
}

std::vector<std::string> solution_environment(const EvalParams& params) {
  std::vector<std::string> env;
  if (params.rng_seed) env.push_back("JUDGE_SEED=" + std::to_string(*params.rng_seed));
  for (const auto& [key, value] : params.passthrough) {
    if (key == "rng_seed") continue;
    std::string name = key;
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return std::isalnum(c) ? std::toupper(c) : '_'; });
    if (key == "time_limit") name = "TIME_LIMIT_MS";
    env.push_back("JUDGE_" + name + "=" + value);
  }
  return env;
}

namespace {

constexpr int kMinFd = 10;
constexpr std::size_t kChildStack = 256 * 1024;

// Setup stages reported back by the in-namespace init process.
enum Stage : int {
  kStageMountPrivate = 1,
  kStageBind,
  kStageRemount,
  kStageTmpfs,
  kStageChroot,
  kStageFork,
  kStageCredentials,
  kStageExec,
};

const char* stage_name(int stage) {
  switch (stage) {
    case kStageMountPrivate: return "make mounts private";
    case kStageBind: return "bind mount";
    case kStageRemount: return "remount read-only";
    case kStageTmpfs: return "mount tmpfs";
    case kStageChroot: return "chroot";
    case kStageFork: return "fork";
    case kStageCredentials: return "credential drop";
    case kStageExec: return "exec";
  }
  return "setup";
}

struct Report {
  std::int32_t kind = 0;  // 0: child finished, 1: setup failure
  std::int32_t stage = 0;
  std::int32_t error = 0;
  std::int32_t status = 0;
};

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  ~Fd() { reset(); }
  Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Fd& operator=(Fd&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  int get() const noexcept { return fd_; }
  void reset() noexcept {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

/// Moves `fd` to a number >= kMinFd with close-on-exec set.
Fd lift(int fd) {
  if (fd < 0) throw SandboxFault(std::string("descriptor setup: ") + std::strerror(errno));
  int lifted = ::fcntl(fd, F_DUPFD_CLOEXEC, kMinFd);
  ::close(fd);
  if (lifted < 0) throw SandboxFault(std::string("fcntl: ") + std::strerror(errno));
  return Fd(lifted);
}

std::pair<Fd, Fd> make_pipe() {
  int p[2];
  if (::pipe2(p, O_CLOEXEC) != 0) throw SandboxFault(std::string("pipe: ") + std::strerror(errno));
  return {lift(p[0]), lift(p[1])};
}

struct MountOp {
  enum Kind { bind_ro, bind_rw, bind_dev, tmpfs, proc } kind;
  std::string source;
  std::string target;  // absolute host path inside the new root
  std::string data;
};

/// Everything the cloned child needs, prepared up front so the child never
/// allocates (the parent may be multi-threaded).
struct ChildContext {
  std::vector<MountOp> mounts;
  std::string root;
  std::string workdir;
  std::vector<std::string> argv_store;
  std::vector<std::string> env_store;
  std::vector<char*> argv;
  std::vector<char*> envp;
  bool isolate = false;
  bool drop_privileges = false;
  bool merge_stderr = false;
  unsigned uid = 0;
  unsigned gid = 0;
  int stdin_fd = -1;
  int stdout_fd = -1;
  int stderr_fd = -1;
  int report_fd = -1;
  int sync_fd = -1;
  std::vector<int> close_in_child;
  rlimit stack{};
  rlimit cpu{};
  rlimit fsize{};
  rlimit nofile{};
  std::optional<rlimit> address_space;
  std::optional<rlimit> nproc;
};

void write_report(int fd, const Report& r) {
  [[maybe_unused]] auto n = ::write(fd, &r, sizeof r);
}

[[noreturn]] void fail(const ChildContext& ctx, int stage) {
  Report r;
  r.kind = 1;
  r.stage = stage;
  r.error = errno;
  write_report(ctx.report_fd, r);
  ::_exit(127);
}

void set_oom_score(const char* value) {
  int fd = ::open("/proc/self/oom_score_adj", O_WRONLY | O_CLOEXEC);
  if (fd >= 0) {
    [[maybe_unused]] auto n = ::write(fd, value, std::strlen(value));
    ::close(fd);
  }
}

void report_exec_failure(int fd, int stage) {
  Report r;
  r.kind = 1;
  r.stage = stage;
  r.error = errno;
  write_report(fd, r);
}

/// Final step in the process that becomes the solution: descriptors,
/// limits, credentials, exec. Failures are reported through fd 3.
[[noreturn]] void become_solution(const ChildContext& ctx, int exec_err_fd) {
  const int err_target = ctx.merge_stderr ? ctx.stdout_fd : ctx.stderr_fd;
  if (::dup2(ctx.stdin_fd, 0) < 0 || ::dup2(ctx.stdout_fd, 1) < 0 || ::dup2(err_target, 2) < 0 ||
      ::dup2(exec_err_fd, 3) < 0) {
    ::_exit(127);
  }
  ::fcntl(3, F_SETFD, FD_CLOEXEC);
  ::syscall(SYS_close_range, 4u, ~0u, 0u);

  set_oom_score("0");
  ::setrlimit(RLIMIT_STACK, &ctx.stack);
  ::setrlimit(RLIMIT_CPU, &ctx.cpu);
  ::setrlimit(RLIMIT_FSIZE, &ctx.fsize);
  ::setrlimit(RLIMIT_NOFILE, &ctx.nofile);
  const rlimit no_core{0, 0};
  ::setrlimit(RLIMIT_CORE, &no_core);
  if (ctx.address_space) ::setrlimit(RLIMIT_AS, &*ctx.address_space);
  if (ctx.nproc) ::setrlimit(RLIMIT_NPROC, &*ctx.nproc);

  if (ctx.drop_privileges) {
    if (::setgroups(0, nullptr) != 0 || ::setgid(ctx.gid) != 0 || ::setuid(ctx.uid) != 0) {
      report_exec_failure(3, kStageCredentials);
      ::_exit(127);
    }
  }
  ::prctl(PR_SET_NO_NEW_PRIVS, 1, 0, 0, 0);
  ::execve(ctx.argv[0], ctx.argv.data(), ctx.envp.data());
  report_exec_failure(3, kStageExec);
  ::_exit(127);
}

bool do_mount(const MountOp& m) {
  constexpr unsigned long common = MS_NOSUID;
  switch (m.kind) {
    case MountOp::bind_ro:
    case MountOp::bind_rw:
    case MountOp::bind_dev: {
      if (::mount(m.source.c_str(), m.target.c_str(), nullptr, MS_BIND | MS_REC, nullptr) != 0) {
        return false;
      }
      unsigned long flags = MS_BIND | MS_REMOUNT | common;
      if (m.kind != MountOp::bind_rw) flags |= MS_RDONLY;
      if (m.kind != MountOp::bind_dev) flags |= MS_NODEV;
      if (m.kind == MountOp::bind_dev) flags &= ~static_cast<unsigned long>(MS_RDONLY);
      return ::mount(nullptr, m.target.c_str(), nullptr, flags, nullptr) == 0;
    }
    case MountOp::tmpfs:
      return ::mount("tmpfs", m.target.c_str(), "tmpfs", common | MS_NODEV, m.data.c_str()) == 0;
    case MountOp::proc:
      // Best effort: some container runtimes refuse fresh proc mounts.
      ::mount("proc", m.target.c_str(), "proc", common | MS_NODEV | MS_NOEXEC, nullptr);
      return true;
  }
  return false;
}

/// Body of the cloned child. In isolated mode this is pid 1 of a fresh pid
/// namespace: it builds the filesystem view, waits for the parent to attach
/// cgroups, then forks the solution and reports its wait status.
int child_main(void* arg) {
  const auto& ctx = *static_cast<const ChildContext*>(arg);
  for (int fd : ctx.close_in_child) ::close(fd);
  ::prctl(PR_SET_PDEATHSIG, SIGKILL);

  if (ctx.isolate) {
    set_oom_score("-1000");
    if (::mount(nullptr, "/", nullptr, MS_REC | MS_PRIVATE, nullptr) != 0) {
      fail(ctx, kStageMountPrivate);
    }
    for (const auto& m : ctx.mounts) {
      if (!do_mount(m)) fail(ctx, m.kind == MountOp::tmpfs ? kStageTmpfs : kStageBind);
    }
    if (::chroot(ctx.root.c_str()) != 0 || ::chdir(ctx.workdir.c_str()) != 0) {
      fail(ctx, kStageChroot);
    }
  } else {
    ::setpgid(0, 0);
    if (::chdir(ctx.workdir.c_str()) != 0) fail(ctx, kStageChroot);
  }

  char go = 0;
  if (::read(ctx.sync_fd, &go, 1) != 1) ::_exit(0);

  if (!ctx.isolate) {
    // Without a pid namespace there is no init: this process becomes the
    // solution directly and the parent reads its wait status.
    become_solution(ctx, ctx.report_fd);
  }

  int err_pipe[2];
  if (::pipe2(err_pipe, O_CLOEXEC) != 0) fail(ctx, kStageFork);
  const pid_t solution = ::fork();
  if (solution < 0) fail(ctx, kStageFork);
  if (solution == 0) {
    ::close(err_pipe[0]);
    become_solution(ctx, err_pipe[1]);
  }
  ::close(err_pipe[1]);
  ::close(ctx.stdout_fd);
  ::close(ctx.stderr_fd);
  ::close(ctx.stdin_fd);

  Report exec_report;
  if (::read(err_pipe[0], &exec_report, sizeof exec_report) == sizeof exec_report) {
    write_report(ctx.report_fd, exec_report);
    ::_exit(127);
  }
  ::close(err_pipe[0]);

  // Reap everything; stop when the solution itself is gone. Leftover
  // descendants die with this namespace.
  int status = 0;
  for (;;) {
    int st = 0;
    pid_t pid = ::waitpid(-1, &st, 0);
    if (pid == solution) {
      status = st;
      break;
    }
    if (pid < 0 && errno != EINTR) break;
  }
  Report r;
  r.kind = 0;
  r.status = status;
  write_report(ctx.report_fd, r);
  ::_exit(0);
}

std::string resolve_program(const std::string& name) {
  if (name.find('/') != std::string::npos) return name;
  for (const char* dir : {"/usr/bin", "/bin", "/usr/sbin", "/sbin"}) {
    fs::path candidate = fs::path(dir) / name;
    if (::access(candidate.c_str(), X_OK) == 0) return candidate.string();
  }
  return name;
}

std::int64_t ceil_ms(std::int64_t ns) { return (ns + 999'999) / 1'000'000; }

/// utime+stime (+ waited-for children) of `pid` in nanoseconds, from /proc.
std::int64_t proc_cpu_ns(pid_t pid) {
  std::ifstream in("/proc/" + std::to_string(pid) + "/stat");
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto close_paren = content.rfind(')');
  if (close_paren == std::string::npos) return 0;
  std::istringstream fields(content.substr(close_paren + 2));
  std::string field;
  std::int64_t ticks = 0;
  for (int index = 3; fields >> field; ++index) {
    if (index >= 14 && index <= 17) ticks += std::stoll(field);
    if (index == 17) break;
  }
  return ticks * (1'000'000'000 / ::sysconf(_SC_CLK_TCK));
}

std::int64_t proc_rss(pid_t pid) {
  std::ifstream in("/proc/" + std::to_string(pid) + "/status");
  std::string key;
  while (in >> key) {
    if (key == "VmRSS:") {
      std::int64_t kb = 0;
      in >> kb;
      return kb * 1024;
    }
    in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
  }
  return 0;
}

void prepare_target(const fs::path& target, bool directory) {
  std::error_code ec;
  if (directory) {
    fs::create_directories(target, ec);
  } else {
    fs::create_directories(target.parent_path(), ec);
    std::ofstream(target).close();
  }
  if (ec) throw SandboxFault("cannot prepare " + target.string() + ": " + ec.message());
}

}  // namespace

struct Sandbox::Impl {
  SandboxConfig config;
  bool isolate = false;
  CgroupRoots cgroups;
  mutable std::mutex slot_mutex;
  mutable std::condition_variable slot_cv;
  mutable int running = 0;
  mutable std::atomic<std::uint64_t> counter{0};

  void acquire() const {
    std::unique_lock lock(slot_mutex);
    slot_cv.wait(lock, [&] { return running < config.max_parallel_runs; });
    ++running;
  }
  void release() const {
    {
      std::lock_guard lock(slot_mutex);
      --running;
    }
    slot_cv.notify_one();
  }

  RawRunResult run(const RunSpec& spec) const;
  void build_root(const fs::path& root, const fs::path& box, const RunSpec& spec,
                  ChildContext& ctx) const;
};

Sandbox::Sandbox(SandboxConfig config) : impl_(std::make_unique<Impl>()) {
  if (config.scratch_root.empty()) {
    config.scratch_root = fs::temp_directory_path() / "judge-sandbox";
  }
  if (config.max_parallel_runs <= 0) {
    config.max_parallel_runs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
  fs::create_directories(config.scratch_root);
  ::chmod(config.scratch_root.c_str(), 0711);
  impl_->config = std::move(config);

  const bool root = ::geteuid() == 0;
  switch (impl_->config.isolation) {
    case Isolation::none:
      impl_->isolate = false;
      break;
    case Isolation::namespaces:
      if (!root) throw SandboxFault("namespace isolation requires root privileges");
      impl_->isolate = true;
      break;
    case Isolation::automatic:
      impl_->isolate = root;
      break;
  }
  if (impl_->config.use_cgroups && root) impl_->cgroups = CgroupRoots::discover();

  if (impl_->config.isolation == Isolation::automatic && impl_->isolate) {
    // Confirm namespaces actually work here before committing to them.
    RunSpec probe;
    probe.argv = {"/bin/true"};
    probe.cpu_limit_ms = 5000;
    probe.wall_limit_ms = 10000;
    try {
      auto r = impl_->run(probe);
      if (!r.exit.clean()) impl_->isolate = false;
    } catch (const SandboxFault&) {
      impl_->isolate = false;
    }
  }
}

Sandbox::~Sandbox() = default;

bool Sandbox::isolated() const noexcept { return impl_->isolate; }
bool Sandbox::uses_cgroups() const noexcept { return impl_->cgroups.usable(); }
const SandboxConfig& Sandbox::config() const noexcept { return impl_->config; }

std::string Sandbox::box_path(const fs::path& host_box) const {
  return impl_->isolate ? std::string("/box") : host_box.string();
}

std::string Sandbox::bind_path(const BindMount& bind, const std::string& file) const {
  const fs::path base = impl_->isolate ? fs::path(bind.target) : bind.host;
  return file.empty() ? base.string() : (base / file).string();
}

RawRunResult Sandbox::run(const RunSpec& spec) const { return impl_->run(spec); }

RawRunResult Sandbox::execute(const Artifact& artifact, const Bytes& input,
                              const EvalParams& params) const {
  RunSpec spec;
  const BindMount sol{artifact.path.parent_path(), "/sol"};
  const std::string bin = bind_path(sol, artifact.path.filename().string());
  for (const auto& arg : artifact.run_command) {
    std::string a = arg;
    if (auto pos = a.find("{bin_path}"); pos != std::string::npos) a.replace(pos, 10, bin);
    spec.argv.push_back(std::move(a));
  }
  spec.binds.push_back(sol);
  spec.env = solution_environment(params);
  spec.stdin_data = input;
  spec.cpu_limit_ms = params.time_limit;
  spec.wall_limit_ms = 2 * params.time_limit;
  spec.memory_limit = params.memory_limit;
  spec.output_limit = params.output_limit;
  return impl_->run(spec);
}

void Sandbox::Impl::build_root(const fs::path& root, const fs::path& box, const RunSpec& spec,
                               ChildContext& ctx) const {
  fs::create_directories(root);
  ::chmod(root.c_str(), 0755);
  for (const auto& p : config.system_paths) {
    std::error_code ec;
    const auto status = fs::symlink_status(p, ec);
    if (ec || !fs::exists(status)) continue;
    const fs::path target = root / fs::path(p).relative_path();
    if (fs::is_symlink(status)) {
      fs::create_directories(target.parent_path());
      fs::create_symlink(fs::read_symlink(p), target);
      continue;
    }
    prepare_target(target, fs::is_directory(status));
    ctx.mounts.push_back({MountOp::bind_ro, p, target.string(), {}});
  }
  for (const char* dev : {"/dev/null", "/dev/zero", "/dev/urandom", "/dev/random"}) {
    const fs::path target = root / fs::path(dev).relative_path();
    prepare_target(target, false);
    ctx.mounts.push_back({MountOp::bind_dev, dev, target.string(), {}});
  }
  prepare_target(root / "box", true);
  ctx.mounts.push_back({MountOp::bind_rw, box.string(), (root / "box").string(), {}});
  for (const auto& b : spec.binds) {
    const fs::path target = root / fs::path(b.target).relative_path();
    prepare_target(target, true);
    ctx.mounts.push_back({MountOp::bind_ro, b.host.string(), target.string(), {}});
  }
  prepare_target(root / "tmp", true);
  ctx.mounts.push_back({MountOp::tmpfs, "tmpfs", (root / "tmp").string(),
                        "size=" + std::to_string(spec.tmp_size) + ",mode=1777"});
  prepare_target(root / "proc", true);
  ctx.mounts.push_back({MountOp::proc, "proc", (root / "proc").string(), {}});
}

RawRunResult Sandbox::Impl::run(const RunSpec& spec) const {
  if (spec.argv.empty()) throw SandboxFault("empty argument vector");
  acquire();
  struct SlotGuard {
    const Impl* impl;
    ~SlotGuard() { impl->release(); }
  } slot_guard{this};

  auto scratch = ScratchDir::create(config.scratch_root, "run-");
  const fs::path run_dir = scratch->path();
  ::chmod(run_dir.c_str(), 0755);
  fs::path box = spec.box;
  if (box.empty()) {
    box = run_dir / "box";
    fs::create_directories(box);
  }
  const bool drop = isolate && ::geteuid() == 0;
  if (drop) {
    std::error_code ec;
    for (auto it = fs::recursive_directory_iterator(box, ec); it != fs::recursive_directory_iterator();
         it.increment(ec)) {
      [[maybe_unused]] int rc = ::lchown(it->path().c_str(), config.run_uid, config.run_gid);
    }
    if (::chown(box.c_str(), config.run_uid, config.run_gid) != 0) {
      throw SandboxFault("cannot hand box to the sandbox user: " + std::string(std::strerror(errno)));
    }
    for (const auto& b : spec.binds) {
      ::chmod(b.host.c_str(), 0755);
    }
  }

  // stdin comes from a file outside the sandbox view.
  const fs::path stdin_path = run_dir / "stdin";
  {
    std::ofstream in(stdin_path, std::ios::binary);
    in.write(spec.stdin_data.data(), static_cast<std::streamsize>(spec.stdin_data.size()));
    if (!in) throw SandboxFault("cannot write stdin file");
  }
  Fd stdin_fd = lift(::open(stdin_path.c_str(), O_RDONLY | O_CLOEXEC));
  auto [out_r, out_w] = make_pipe();
  auto [err_r, err_w] = make_pipe();
  auto [report_r, report_w] = make_pipe();
  auto [sync_r, sync_w] = make_pipe();

  ChildContext ctx;
  ctx.isolate = isolate;
  ctx.drop_privileges = drop;
  ctx.merge_stderr = spec.merge_stderr;
  ctx.uid = config.run_uid;
  ctx.gid = config.run_gid;
  ctx.stdin_fd = stdin_fd.get();
  ctx.stdout_fd = out_w.get();
  ctx.stderr_fd = err_w.get();
  ctx.report_fd = report_w.get();
  ctx.sync_fd = sync_r.get();
  ctx.close_in_child = {out_r.get(), err_r.get(), report_r.get(), sync_w.get()};
  if (isolate) {
    ctx.root = (run_dir / "root").string();
    ctx.workdir = "/box";
    build_root(ctx.root, box, spec, ctx);
  } else {
    ctx.workdir = box.string();
  }

  ctx.argv_store = spec.argv;
  ctx.argv_store[0] = resolve_program(ctx.argv_store[0]);
  ctx.env_store = {"PATH=/usr/bin:/bin", "HOME=" + (isolate ? std::string("/box") : box.string()),
                   "TMPDIR=/tmp", "LANG=C.UTF-8"};
  ctx.env_store.insert(ctx.env_store.end(), spec.env.begin(), spec.env.end());
  for (auto& a : ctx.argv_store) ctx.argv.push_back(a.data());
  ctx.argv.push_back(nullptr);
  for (auto& e : ctx.env_store) ctx.envp.push_back(e.data());
  ctx.envp.push_back(nullptr);

  const rlim_t stack = static_cast<rlim_t>(spec.memory_limit);
  ctx.stack = {stack, stack};
  const rlim_t cpu_s = static_cast<rlim_t>(spec.cpu_limit_ms / 1000 + 1);
  ctx.cpu = {cpu_s, cpu_s + 1};
  ctx.fsize = {static_cast<rlim_t>(config.file_size_limit),
               static_cast<rlim_t>(config.file_size_limit)};
  ctx.nofile = {256, 256};
  const bool metered = cgroups.usable();
  if (!metered) {
    const auto as = static_cast<rlim_t>(2 * spec.memory_limit + 256 * kMiB);
    ctx.address_space = rlimit{as, as};
  }
  const int max_tasks = spec.max_tasks.value_or(config.max_tasks);
  if (cgroups.pids.empty() && drop) {
    ctx.nproc = rlimit{static_cast<rlim_t>(max_tasks), static_cast<rlim_t>(max_tasks)};
  }

  std::optional<RunCgroup> cgroup;
  if (metered) {
    cgroup.emplace(cgroups, "judge-" + std::to_string(::getpid()) + "-" +
                                std::to_string(counter.fetch_add(1)));
    cgroup->limit_memory(spec.memory_limit);
    cgroup->limit_tasks(max_tasks);
  }

  void* stack_mem = ::mmap(nullptr, kChildStack, PROT_READ | PROT_WRITE,
                           MAP_PRIVATE | MAP_ANONYMOUS | MAP_STACK, -1, 0);
  if (stack_mem == MAP_FAILED) throw SandboxFault("cannot allocate child stack");
  struct StackGuard {
    void* p;
    ~StackGuard() { ::munmap(p, kChildStack); }
  } stack_guard{stack_mem};

  int flags = SIGCHLD;
  if (isolate) flags |= CLONE_NEWNS | CLONE_NEWPID | CLONE_NEWNET | CLONE_NEWIPC | CLONE_NEWUTS;
  const auto started = Clock::now();
  const pid_t child =
      ::clone(child_main, static_cast<char*>(stack_mem) + kChildStack, flags, &ctx);
  if (child < 0) throw SandboxFault(std::string("clone: ") + std::strerror(errno));

  out_w.reset();
  err_w.reset();
  report_w.reset();
  sync_r.reset();
  stdin_fd.reset();

  bool reaped = false;
  int wait_status = 0;
  rusage usage{};
  auto kill_child = [&] {
    if (isolate) {
      ::kill(child, SIGKILL);
    } else {
      ::kill(-child, SIGKILL);
      ::kill(child, SIGKILL);
    }
    if (cgroup) cgroup->kill_all();
  };

  try {
    if (cgroup) cgroup->attach(child);
  } catch (...) {
    kill_child();
    ::wait4(child, &wait_status, 0, &usage);
    throw;
  }
  const char go = 1;
  if (::write(sync_w.get(), &go, 1) != 1) {
    kill_child();
    ::wait4(child, &wait_status, 0, &usage);
    throw SandboxFault("child vanished during setup");
  }
  sync_w.reset();

  RawRunResult result;
  std::int64_t output_total = 0;
  std::int64_t fallback_cpu_ns = 0;
  std::int64_t fallback_peak = 0;
  bool out_open = true;
  bool err_open = true;
  bool killed = false;
  bool memory_hit = false;
  std::optional<Clock::time_point> reaped_at;
  const auto cpu_limit_ns = spec.cpu_limit_ms * 1'000'000;
  const auto wall_limit = std::chrono::milliseconds(spec.wall_limit_ms);
  char buf[65536];

  auto drain = [&](int fd, bool is_stdout) -> bool {
    for (;;) {
      const ssize_t n = ::read(fd, buf, sizeof buf);
      if (n > 0) {
        if (is_stdout) {
          output_total += n;
          const auto keep = std::min<std::int64_t>(
              n, std::max<std::int64_t>(0, spec.output_limit + 1 -
                                               static_cast<std::int64_t>(result.stdout_data.size())));
          result.stdout_data.append(buf, static_cast<std::size_t>(keep));
        } else {
          const auto keep = std::min<std::int64_t>(
              n, std::max<std::int64_t>(0, config.stderr_cap -
                                               static_cast<std::int64_t>(result.stderr_data.size())));
          result.stderr_data.append(buf, static_cast<std::size_t>(keep));
        }
        if (n < static_cast<ssize_t>(sizeof buf)) return true;
        continue;
      }
      if (n == 0) return false;
      if (errno == EINTR) continue;
      return true;  // EAGAIN
    }
  };
  ::fcntl(out_r.get(), F_SETFL, O_NONBLOCK);
  ::fcntl(err_r.get(), F_SETFL, O_NONBLOCK);

  while (true) {
    pollfd pfds[2];
    nfds_t n = 0;
    if (out_open) pfds[n++] = {out_r.get(), POLLIN, 0};
    if (err_open) pfds[n++] = {err_r.get(), POLLIN, 0};
    if (n > 0) {
      ::poll(pfds, n, static_cast<int>(config.poll_interval.count()));
      for (nfds_t i = 0; i < n; ++i) {
        if (pfds[i].revents == 0) continue;
        if (pfds[i].fd == out_r.get()) out_open = drain(out_r.get(), true);
        if (pfds[i].fd == err_r.get()) err_open = drain(err_r.get(), false);
      }
    } else {
      std::this_thread::sleep_for(config.poll_interval);
    }

    if (!reaped) {
      if (spec.kill_on_output_limit && output_total > spec.output_limit && !killed) {
        killed = true;
        kill_child();
      }
      const std::int64_t cpu_now = cgroup ? cgroup->cpu_ns() : proc_cpu_ns(child);
      if (!cgroup) {
        fallback_cpu_ns = std::max(fallback_cpu_ns, cpu_now);
        const auto rss = proc_rss(child);
        fallback_peak = std::max(fallback_peak, rss);
        if (rss > spec.memory_limit && !killed) {
          memory_hit = true;
          killed = true;
          kill_child();
        }
      }
      if (cpu_now > cpu_limit_ns && !killed) {
        killed = true;
        kill_child();
      }
      if (Clock::now() - started > wall_limit && !killed) {
        result.limit_hits.set(Limit::wall);
        killed = true;
        kill_child();
      }
      const pid_t w = ::wait4(child, &wait_status, WNOHANG, &usage);
      if (w == child) {
        reaped = true;
        reaped_at = Clock::now();
        if (!isolate) ::kill(-child, SIGKILL);  // stragglers holding our pipes
      }
    }
    if (reaped && !out_open && !err_open) break;
    if (reaped && Clock::now() - *reaped_at > std::chrono::seconds(2)) break;
  }
  const auto finished = Clock::now();

  Report report;
  const bool have_report = ::read(report_r.get(), &report, sizeof report) == sizeof report;
  if (have_report && report.kind == 1) {
    throw SandboxFault(std::string("sandbox ") + stage_name(report.stage) + " failed: " +
                       std::strerror(report.error) + " (" + spec.argv[0] + ")");
  }

  const int status = isolate ? (have_report ? report.status : 0) : wait_status;
  if (isolate && !have_report) {
    result.exit = ExitInfo::signaled(SIGKILL);
  } else if (WIFSIGNALED(status)) {
    result.exit = ExitInfo::signaled(WTERMSIG(status));
  } else {
    result.exit = ExitInfo::code(WEXITSTATUS(status));
  }

  std::int64_t cpu_ns = 0;
  if (cgroup) {
    cpu_ns = cgroup->cpu_ns();
    result.stats.peak_memory = cgroup->peak_memory();
    if (cgroup->oom_kills() > 0) memory_hit = true;
  } else {
    const std::int64_t rusage_ns =
        (static_cast<std::int64_t>(usage.ru_utime.tv_sec) + usage.ru_stime.tv_sec) * 1'000'000'000 +
        (static_cast<std::int64_t>(usage.ru_utime.tv_usec) + usage.ru_stime.tv_usec) * 1000;
    cpu_ns = std::max(rusage_ns, fallback_cpu_ns);
    result.stats.peak_memory = std::max<std::int64_t>(fallback_peak, usage.ru_maxrss * 1024);
  }
  if (result.stats.peak_memory > spec.memory_limit) memory_hit = true;

  result.stats.cpu_time = ceil_ms(cpu_ns);
  result.stats.wall_time = ceil_ms(
      std::chrono::duration_cast<std::chrono::nanoseconds>(finished - started).count());
  result.stats.output_bytes = output_total;
  result.stats.exit = result.exit;
  if (result.stats.cpu_time > spec.cpu_limit_ms) result.limit_hits.set(Limit::cpu);
  if (spec.kill_on_output_limit && output_total > spec.output_limit) {
    result.limit_hits.set(Limit::output);
  }
  if (memory_hit) result.limit_hits.set(Limit::memory);
  // SIGXCPU from the rlimit backstop is a CPU overrun too.
  if (result.exit.kind == ExitInfo::Kind::signaled && result.exit.value == SIGXCPU) {
    result.limit_hits.set(Limit::cpu);
    result.stats.cpu_time = std::max(result.stats.cpu_time, spec.cpu_limit_ms + 1);
  }
  return result;
}

}  // namespace judge::sandbox

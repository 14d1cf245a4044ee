#include "judge/compile/compile.hpp"

#include "judge/core/scratch.hpp"

#include <elf.h>
#include <glob.h>
#include <sys/stat.h>

#include <bit>
#include <cstring>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

namespace judge::compile {

namespace fs = std::filesystem;

namespace {

/// Bounds-checked reads in the file's byte order.
class Reader {
 public:
  Reader(std::string_view data, bool little) : data_(data), little_(little) {}

  template <class T>
  T get(std::uint64_t offset) const {
    if (offset > data_.size() || data_.size() - offset < sizeof(T)) {
      throw FormatError("truncated ELF file");
    }
    T v;
    std::memcpy(&v, data_.data() + offset, sizeof(T));
    if (little_ != (std::endian::native == std::endian::little)) v = swap(v);
    return v;
  }

  std::string c_string(std::uint64_t offset) const {
    if (offset >= data_.size()) throw FormatError("ELF string offset out of range");
    const auto end = data_.find('\0', offset);
    if (end == std::string_view::npos) throw FormatError("unterminated ELF string");
    return std::string(data_.substr(offset, end - offset));
  }

  std::uint64_t size() const { return data_.size(); }

 private:
  template <class T>
  static T swap(T v) {
    T out = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out = static_cast<T>((out << 8) | ((v >> (8 * i)) & 0xff));
    }
    return out;
  }

  std::string_view data_;
  bool little_;
};

struct Segment {
  std::uint32_t type;
  std::uint64_t offset, vaddr, filesz;
};

template <class Ehdr, class Phdr, class Dyn>
ElfInfo parse_class(const Reader& r, ElfInfo info) {
  const auto phoff = r.get<decltype(Ehdr{}.e_phoff)>(offsetof(Ehdr, e_phoff));
  const auto phentsize = r.get<std::uint16_t>(offsetof(Ehdr, e_phentsize));
  const auto phnum = r.get<std::uint16_t>(offsetof(Ehdr, e_phnum));
  if (phnum > 0 && phentsize < sizeof(Phdr)) throw FormatError("bad ELF program header size");

  std::vector<Segment> segments;
  for (std::uint16_t i = 0; i < phnum; ++i) {
    const std::uint64_t base = phoff + static_cast<std::uint64_t>(i) * phentsize;
    segments.push_back({r.get<std::uint32_t>(base + offsetof(Phdr, p_type)),
                        r.get<decltype(Phdr{}.p_offset)>(base + offsetof(Phdr, p_offset)),
                        r.get<decltype(Phdr{}.p_vaddr)>(base + offsetof(Phdr, p_vaddr)),
                        r.get<decltype(Phdr{}.p_filesz)>(base + offsetof(Phdr, p_filesz))});
  }
  auto to_offset = [&](std::uint64_t vaddr) -> std::uint64_t {
    for (const auto& s : segments) {
      if (s.type == PT_LOAD && vaddr >= s.vaddr && vaddr - s.vaddr < s.filesz) {
        return s.offset + (vaddr - s.vaddr);
      }
    }
    throw FormatError("ELF address not covered by a loadable segment");
  };

  for (const auto& s : segments) {
    if (s.type == PT_INTERP) info.interpreter = r.c_string(s.offset);
  }
  for (const auto& s : segments) {
    if (s.type != PT_DYNAMIC) continue;
    std::uint64_t strtab = 0;
    std::vector<std::uint64_t> needed, rpaths;
    for (std::uint64_t off = s.offset; off + sizeof(Dyn) <= s.offset + s.filesz; off += sizeof(Dyn)) {
      const auto tag = static_cast<std::int64_t>(r.get<decltype(Dyn{}.d_tag)>(off));
      const auto val = static_cast<std::uint64_t>(r.get<decltype(Dyn{}.d_un.d_val)>(off + sizeof(Dyn{}.d_tag)));
      if (tag == DT_NULL) break;
      if (tag == DT_STRTAB) strtab = val;
      if (tag == DT_NEEDED) needed.push_back(val);
      if (tag == DT_RPATH || tag == DT_RUNPATH) rpaths.push_back(val);
    }
    if (needed.empty() && rpaths.empty()) continue;
    if (strtab == 0) throw FormatError("dynamic section without string table");
    const std::uint64_t table = to_offset(strtab);
    for (auto n : needed) info.needed.push_back(r.c_string(table + n));
    for (auto p : rpaths) {
      std::stringstream ss(r.c_string(table + p));
      std::string dir;
      while (std::getline(ss, dir, ':')) {
        if (!dir.empty()) info.search_paths.push_back(dir);
      }
    }
  }
  return info;
}

std::string read_file(const fs::path& p, std::size_t limit = std::string::npos) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return {};
  std::string out;
  if (limit == std::string::npos) {
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  out.resize(limit);
  in.read(out.data(), static_cast<std::streamsize>(limit));
  out.resize(static_cast<std::size_t>(in.gcount()));
  return out;
}

void read_ld_conf(const fs::path& file, std::vector<fs::path>& dirs, int depth) {
  if (depth > 8) return;
  std::ifstream in(file);
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::stringstream ss(line);
    std::string word;
    if (!(ss >> word)) continue;
    if (word == "include") {
      std::string pattern;
      while (ss >> pattern) {
        if (!pattern.empty() && pattern.front() != '/') pattern = (file.parent_path() / pattern).string();
        glob_t g{};
        if (::glob(pattern.c_str(), 0, nullptr, &g) == 0) {
          for (std::size_t i = 0; i < g.gl_pathc; ++i) read_ld_conf(g.gl_pathv[i], dirs, depth + 1);
        }
        ::globfree(&g);
      }
    } else if (word.front() == '/') {
      dirs.emplace_back(word);
    }
  }
}

std::uint16_t host_machine() {
#if defined(__x86_64__)
  return EM_X86_64;
#elif defined(__aarch64__)
  return EM_AARCH64;
#elif defined(__i386__)
  return EM_386;
#elif defined(__riscv)
  return EM_RISCV;
#else
  return ElfInfo{}.machine;
#endif
}

/// ELF header facts of a library candidate, or nullopt if it is not ELF.
std::optional<ElfInfo> try_parse(const fs::path& p) {
  try {
    return parse_elf(read_file(p));
  } catch (const FormatError&) {
    return std::nullopt;
  }
}

}  // namespace

ElfInfo parse_elf(std::string_view data) {
  if (data.size() < EI_NIDENT || std::memcmp(data.data(), ELFMAG, SELFMAG) != 0) {
    throw FormatError("not an ELF file");
  }
  const auto cls = static_cast<unsigned char>(data[EI_CLASS]);
  const auto enc = static_cast<unsigned char>(data[EI_DATA]);
  if (cls != ELFCLASS32 && cls != ELFCLASS64) throw FormatError("unknown ELF class");
  if (enc != ELFDATA2LSB && enc != ELFDATA2MSB) throw FormatError("unknown ELF byte order");
  const Reader r(data, enc == ELFDATA2LSB);
  ElfInfo info;
  info.is_64 = cls == ELFCLASS64;
  info.type = r.get<std::uint16_t>(offsetof(Elf64_Ehdr, e_type));
  info.machine = r.get<std::uint16_t>(offsetof(Elf64_Ehdr, e_machine));
  return info.is_64 ? parse_class<Elf64_Ehdr, Elf64_Phdr, Elf64_Dyn>(r, std::move(info))
                    : parse_class<Elf32_Ehdr, Elf32_Phdr, Elf32_Dyn>(r, std::move(info));
}

BinaryEnvironment BinaryEnvironment::host() {
  BinaryEnvironment env;
  env.machine = host_machine();
  read_ld_conf("/etc/ld.so.conf", env.library_dirs, 0);
  for (const char* d : {"/lib", "/usr/lib", "/lib64", "/usr/lib64"}) env.library_dirs.emplace_back(d);
  return env;
}

Artifact verify_binary(const Submission& submission, const ResourceLimits& limits,
                       const CompileContext& ctx, const BinaryEnvironment& env) {
  const auto* binary = std::get_if<BinaryPayload>(&submission.payload);
  if (binary == nullptr) throw CompileError("verify_binary needs a static_binary payload");
  const auto size = static_cast<std::int64_t>(binary->data.size());
  if (size > limits.binary_size) {
    throw BinaryTooLarge("binary is " + std::to_string(size) + " bytes, limit " +
                         std::to_string(limits.binary_size));
  }
  ElfInfo info;
  try {
    info = parse_elf(binary->data);
  } catch (const FormatError& e) {
    throw IncompatibleArchitecture(std::string("not a runnable executable: ") + e.what());
  }
  if (info.machine != env.machine) {
    throw IncompatibleArchitecture("binary machine type " + std::to_string(info.machine) +
                                   " does not match host machine type " +
                                   std::to_string(env.machine));
  }
  if (info.type != ET_EXEC && info.type != ET_DYN) {
    throw IncompatibleArchitecture("ELF file is not an executable");
  }
  if (info.interpreter) {
    std::error_code ec;
    if (!fs::exists(*info.interpreter, ec)) {
      throw MissingDependency(*info.interpreter);
    }
  }

  // Breadth-first over DT_NEEDED, searching the binary's own rpath entries
  // first, then the environment's directories, skipping wrong-arch copies.
  std::set<std::string> resolved;
  std::deque<std::pair<std::string, std::vector<std::string>>> pending;
  for (const auto& n : info.needed) pending.emplace_back(n, info.search_paths);
  while (!pending.empty()) {
    auto [name, rpaths] = pending.front();
    pending.pop_front();
    if (resolved.contains(name)) continue;
    std::optional<ElfInfo> found;
    std::vector<fs::path> dirs;
    if (name.find('/') != std::string::npos) {
      dirs.emplace_back(fs::path(name).parent_path());
      name = fs::path(name).filename().string();
    }
    for (const auto& p : rpaths) {
      if (!p.empty() && p.front() == '/') dirs.emplace_back(p);
    }
    dirs.insert(dirs.end(), env.library_dirs.begin(), env.library_dirs.end());
    for (const auto& dir : dirs) {
      const fs::path candidate = dir / name;
      std::error_code ec;
      if (!fs::is_regular_file(candidate, ec)) continue;
      auto lib = try_parse(candidate);
      if (lib && lib->machine == env.machine && lib->is_64 == info.is_64) {
        found = std::move(lib);
        break;
      }
    }
    if (!found) throw MissingDependency(name);
    resolved.insert(name);
    for (const auto& n : found->needed) pending.emplace_back(n, found->search_paths);
  }

  Artifact artifact;
  artifact.language_id = "static_binary";
  artifact.size = size;
  artifact.storage = ScratchDir::create(
      ctx.artifact_root.empty() ? ctx.sandbox->config().scratch_root / "artifacts" : ctx.artifact_root,
      "artifact-");
  ::chmod(artifact.storage->path().c_str(), 0755);
  artifact.path = artifact.storage->path() / "solution";
  {
    std::ofstream out(artifact.path, std::ios::binary);
    out.write(binary->data.data(), static_cast<std::streamsize>(binary->data.size()));
    if (!out) throw InfrastructureError("cannot store binary");
  }
  ::chmod(artifact.path.c_str(), 0755);
  return artifact;
}

}  // namespace judge::compile

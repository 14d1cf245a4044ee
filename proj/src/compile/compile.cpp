#include "judge/compile/compile.hpp"

#include "judge/core/codec.hpp"
#include "judge/core/scratch.hpp"

#include <sys/stat.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace judge::compile {

namespace fs = std::filesystem;

namespace {

int count_placeholder(const std::vector<std::string>& argv, std::string_view placeholder) {
  int n = 0;
  for (const auto& arg : argv) {
    for (auto pos = arg.find(placeholder); pos != std::string::npos;
         pos = arg.find(placeholder, pos + placeholder.size())) {
      ++n;
    }
  }
  return n;
}

void replace_all(std::string& s, std::string_view from, const std::string& to) {
  for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

bool valid_file_name(const std::string& name) {
  if (name.empty() || name.size() > 128 || name.front() == '.') return false;
  return std::all_of(name.begin(), name.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '.' || c == '_' || c == '-';
  });
}

void write_bytes(const fs::path& p, std::string_view data) {
  std::ofstream out(p, std::ios::binary);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw InfrastructureError("cannot write " + p.string());
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string cap_log(const std::string& log) {
  if (static_cast<std::int64_t>(log.size()) <= kCompileLogCap) return log;
  return log.substr(0, static_cast<std::size_t>(kCompileLogCap)) + std::string(kTruncationMarker);
}

fs::path artifact_root(const CompileContext& ctx) {
  if (!ctx.artifact_root.empty()) return ctx.artifact_root;
  return ctx.sandbox->config().scratch_root / "artifacts";
}

std::shared_ptr<ScratchDir> new_artifact_dir(const CompileContext& ctx) {
  auto dir = ScratchDir::create(artifact_root(ctx), "artifact-");
  ::chmod(dir->path().c_str(), 0755);
  return dir;
}

std::string size_message(std::int64_t size, std::int64_t limit) {
  return "binary is " + std::to_string(size) + " bytes, limit " + std::to_string(limit);
}

}  // namespace

std::vector<std::string> validate_toolchain(const Toolchain& t) {
  std::vector<std::string> out;
  const std::string where = "toolchain '" + t.language_id + "': ";
  if (t.language_id.empty()) out.push_back("toolchain: language_id required");
  if (t.compile_command.empty()) out.push_back(where + "compile_command must be non-empty");
  if (t.run_command.empty()) out.push_back(where + "run_command must be non-empty");
  const int src = count_placeholder(t.compile_command, "{src_dir}");
  const int sources = count_placeholder(t.compile_command, "{sources}");
  const int out_path = count_placeholder(t.compile_command, "{out_path}");
  if (src > 1) out.push_back(where + "{src_dir} may appear at most once");
  if (sources > 1) out.push_back(where + "{sources} may appear at most once");
  if (src + sources == 0) out.push_back(where + "compile_command must reference {src_dir} or {sources}");
  if (sources == 1 && std::find(t.compile_command.begin(), t.compile_command.end(), "{sources}") ==
                          t.compile_command.end()) {
    out.push_back(where + "{sources} must be a whole argument");
  }
  if (t.is_interpreted ? out_path > 1 : out_path != 1) {
    out.push_back(where + "{out_path} must appear exactly once" +
                  (t.is_interpreted ? std::string(" if present") : std::string()));
  }
  if (count_placeholder(t.run_command, "{bin_path}") != 1) {
    out.push_back(where + "run_command must contain {bin_path} exactly once");
  }
  if (!valid_file_name(t.source_name)) out.push_back(where + "source_name is not a plain file name");
  if (t.memory_limit <= 0) out.push_back(where + "memory_limit must be > 0");
  return out;
}

ToolchainRegistry::ToolchainRegistry(std::vector<Toolchain> toolchains) {
  std::vector<std::string> problems;
  for (auto& t : toolchains) {
    auto v = validate_toolchain(t);
    problems.insert(problems.end(), v.begin(), v.end());
    if (!by_id_.emplace(t.language_id, t).second) {
      problems.push_back("toolchain '" + t.language_id + "' defined twice");
    }
  }
  if (!problems.empty()) {
    std::string msg = "invalid toolchain registry:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw FormatError(msg);
  }
}

ToolchainRegistry ToolchainRegistry::parse(std::string_view json_text) {
  const Json j = parse_json(json_text);
  if (!j.is_array()) throw FormatError("toolchain registry must be a JSON list");
  std::vector<Toolchain> list;
  try {
    for (const auto& e : j) {
      Toolchain t;
      t.language_id = e.at("language_id").get<std::string>();
      t.compile_command = e.at("compile_command").get<std::vector<std::string>>();
      t.run_command = e.value("run_command", std::vector<std::string>{"{bin_path}"});
      t.is_interpreted = e.value("is_interpreted", false);
      t.source_name = e.value("source_name", std::string("main"));
      t.memory_limit = e.value("memory_limit", t.memory_limit);
      list.push_back(std::move(t));
    }
  } catch (const Json::exception& e) {
    throw FormatError(std::string("toolchain registry: ") + e.what());
  }
  return ToolchainRegistry(std::move(list));
}

ToolchainRegistry ToolchainRegistry::load(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw FormatError("cannot read toolchain registry " + file.string());
  return parse(read_bytes(file));
}

fs::path ToolchainRegistry::default_path() {
  if (const char* env = std::getenv("JUDGE_TOOLCHAINS"); env && *env) return env;
  return JUDGE_DEFAULT_TOOLCHAINS;
}

const Toolchain* ToolchainRegistry::find(std::string_view language_id) const noexcept {
  auto it = by_id_.find(language_id);
  return it == by_id_.end() ? nullptr : &it->second;
}

const Toolchain& ToolchainRegistry::at(std::string_view language_id) const {
  if (const auto* t = find(language_id)) return *t;
  throw UnknownLanguage("unknown language '" + std::string(language_id) + "'");
}

std::vector<std::string> ToolchainRegistry::languages() const {
  std::vector<std::string> out;
  for (const auto& [id, t] : by_id_) out.push_back(id);
  return out;
}

Artifact compile(const Submission& submission, const Toolchain& toolchain,
                 const ResourceLimits& limits, const CompileContext& ctx) {
  const auto* source = std::get_if<SourcePayload>(&submission.payload);
  if (source == nullptr) throw CompileError("compile needs a source payload");
  if (source->language_id != toolchain.language_id) {
    throw UnknownLanguage("submission language '" + source->language_id +
                          "' does not match toolchain '" + toolchain.language_id + "'");
  }
  if (source->files.empty()) throw CompileDiagnostics("submission has no source files");
  std::set<std::string> names;
  for (const auto& f : source->files) {
    if (source->files.size() > 1 && (!valid_file_name(f.name) || !names.insert(f.name).second)) {
      throw CompileDiagnostics("invalid or duplicate source file name '" + f.name + "'");
    }
  }

  const auto& box_owner = *ctx.sandbox;
  auto work = ScratchDir::create(box_owner.config().scratch_root, "compile-");
  const fs::path box = work->path() / "box";
  fs::create_directories(box / "src");
  fs::create_directories(box / "out");

  std::vector<std::string> file_names;
  if (source->files.size() == 1) {
    file_names.push_back(toolchain.source_name);
    write_bytes(box / "src" / toolchain.source_name, source->files[0].data);
  } else {
    for (const auto& f : source->files) {
      file_names.push_back(f.name);
      write_bytes(box / "src" / f.name, f.data);
    }
  }

  const std::string view_box = box_owner.box_path(box);
  const std::string src_dir = view_box + "/src";
  const std::string out_path = view_box + "/out/solution";
  sandbox::RunSpec spec;
  for (const auto& arg : toolchain.compile_command) {
    if (arg == "{sources}") {
      for (const auto& n : file_names) spec.argv.push_back(src_dir + "/" + n);
      continue;
    }
    std::string a = arg;
    replace_all(a, "{src_dir}", src_dir);
    replace_all(a, "{out_path}", out_path);
    spec.argv.push_back(std::move(a));
  }
  spec.box = box;
  spec.cpu_limit_ms = limits.compile_time;
  spec.wall_limit_ms = limits.compile_time;
  spec.memory_limit = toolchain.memory_limit;
  spec.output_limit = kCompileLogCap;
  spec.kill_on_output_limit = false;
  spec.merge_stderr = true;
  spec.tmp_size = 256 * kMiB;

  const auto raw = box_owner.run(spec);
  const std::string log = cap_log(raw.stdout_data);
  using sandbox::Limit;
  if (raw.limit_hits.contains(Limit::cpu) || raw.limit_hits.contains(Limit::wall)) {
    const char* clock = raw.limit_hits.contains(Limit::cpu) ? "cpu" : "wall";
    throw CompileTimeout(
        "compilation exceeded " + std::to_string(limits.compile_time) + " ms of " + clock + " time", log);
  }
  if (raw.limit_hits.contains(Limit::memory)) {
    throw CompileDiagnostics("compiler exceeded memory limit", log);
  }
  if (!raw.exit.clean()) throw CompileDiagnostics("compilation failed", log);

  Artifact artifact;
  artifact.language_id = toolchain.language_id;
  artifact.compile_log = log;
  artifact.run_command = toolchain.run_command;
  artifact.storage = new_artifact_dir(ctx);

  if (toolchain.is_interpreted) {
    std::int64_t total = 0;
    for (const auto& n : file_names) {
      const fs::path dst = artifact.storage->path() / n;
      fs::copy_file(box / "src" / n, dst, fs::copy_options::overwrite_existing);
      ::chmod(dst.c_str(), 0644);
      total += static_cast<std::int64_t>(fs::file_size(dst));
    }
    if (std::find(file_names.begin(), file_names.end(), toolchain.source_name) == file_names.end()) {
      throw CompileDiagnostics("entry file '" + toolchain.source_name + "' missing", log);
    }
    artifact.path = artifact.storage->path() / toolchain.source_name;
    artifact.size = total;
  } else {
    const fs::path produced = box / "out" / "solution";
    std::error_code ec;
    if (!fs::is_regular_file(produced, ec)) {
      throw CompileDiagnostics("compiler produced no executable", log);
    }
    artifact.size = static_cast<std::int64_t>(fs::file_size(produced));
    if (artifact.size > limits.binary_size) {
      throw BinaryTooLarge(size_message(artifact.size, limits.binary_size), log);
    }
    artifact.path = artifact.storage->path() / "solution";
    fs::copy_file(produced, artifact.path);
    ::chmod(artifact.path.c_str(), 0755);
  }
  if (artifact.size > limits.binary_size) {
    throw BinaryTooLarge(size_message(artifact.size, limits.binary_size), log);
  }
  return artifact;
}

Artifact build(const Submission& submission, const ToolchainRegistry& registry,
               const ResourceLimits& limits, const CompileContext& ctx) {
  if (const auto* source = std::get_if<SourcePayload>(&submission.payload)) {
    return compile(submission, registry.at(source->language_id), limits, ctx);
  }
  return verify_binary(submission, limits, ctx);
}

}  // namespace judge::compile

#include "judge/service/config.hpp"

#include "judge/core/codec.hpp"
#include "judge/core/error.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

extern char** environ;

namespace judge::service {

namespace {

std::int64_t integer(const std::string& name, const std::string& text, std::int64_t lo, std::int64_t hi) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || v < lo || v > hi) {
    throw FormatError(name + ": expected an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                      "], got '" + text + "'");
  }
  return v;
}

template <class T>
T json_integer(const Json& j, const std::string& key, std::int64_t lo, std::int64_t hi) {
  if (!j.is_number_integer()) throw FormatError("config " + key + ": expected an integer");
  const auto v = j.get<std::int64_t>();
  if (v < lo || v > hi) throw FormatError("config " + key + ": out of range");
  return static_cast<T>(v);
}

std::string json_string(const Json& j, const std::string& key) {
  if (!j.is_string()) throw FormatError("config " + key + ": expected a string");
  return j.get<std::string>();
}

}  // namespace

ServiceConfig load_config(const std::map<std::string, std::string>& env,
                          const std::optional<std::filesystem::path>& config_file) {
  ServiceConfig c;
  auto get = [&](const char* key) -> const std::string* {
    auto it = env.find(key);
    return it == env.end() || it->second.empty() ? nullptr : &it->second;
  };
  if (auto v = get("JUDGE_PORT")) c.port = static_cast<int>(integer("JUDGE_PORT", *v, 0, 65535));
  if (auto v = get("JUDGE_DATA_DIR")) c.data_dir = *v;
  if (auto v = get("JUDGE_WORKERS")) c.workers = static_cast<int>(integer("JUDGE_WORKERS", *v, 1, 1024));
  if (auto v = get("JUDGE_MAX_PARALLEL_RUNS")) {
    c.max_parallel_runs = static_cast<int>(integer("JUDGE_MAX_PARALLEL_RUNS", *v, 0, 1024));
  }
  if (auto v = get("JUDGE_ADMIN_TOKEN")) c.admin_token = *v;
  if (auto v = get("JUDGE_UI_DIR")) c.ui_dir = *v;
  if (auto v = get("JUDGE_TOOLCHAINS")) c.toolchains = *v;

  if (!config_file) return c;
  std::ifstream in(*config_file);
  if (!in) throw FormatError("cannot read config file " + config_file->string());
  std::stringstream ss;
  ss << in.rdbuf();
  const Json j = parse_json(ss.str());
  if (!j.is_object()) throw FormatError("config file must hold a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "host") {
      c.host = json_string(v, key);
    } else if (key == "port") {
      c.port = json_integer<int>(v, key, 0, 65535);
    } else if (key == "data_dir") {
      c.data_dir = json_string(v, key);
    } else if (key == "workers") {
      c.workers = json_integer<int>(v, key, 1, 1024);
    } else if (key == "max_parallel_runs") {
      c.max_parallel_runs = json_integer<int>(v, key, 0, 1024);
    } else if (key == "admin_token") {
      c.admin_token = json_string(v, key);
    } else if (key == "max_source_bytes") {
      c.max_source_bytes = json_integer<std::int64_t>(v, key, 1, std::int64_t{1} << 40);
    } else if (key == "ui_dir") {
      c.ui_dir = json_string(v, key);
    } else if (key == "toolchains") {
      c.toolchains = json_string(v, key);
    } else if (key == "problems") {
      if (!v.is_array()) throw FormatError("config problems: expected an array of paths");
      c.problems.clear();
      for (const auto& p : v) c.problems.emplace_back(json_string(p, key));
    } else if (key == "claim_timeout_ms") {
      c.claim_timeout_ms = json_integer<std::int64_t>(v, key, 1, std::int64_t{1} << 40);
    } else if (key == "max_attempts") {
      c.max_attempts = json_integer<int>(v, key, 1, 100);
    } else if (key == "snapshot_every") {
      c.snapshot_every = json_integer<int>(v, key, 0, 1 << 30);
    } else {
      throw FormatError("config: unknown key '" + key + "'");
    }
  }
  return c;
}

ServiceConfig config_from_environment(const std::optional<std::filesystem::path>& config_file) {
  std::map<std::string, std::string> env;
  for (char** e = environ; *e != nullptr; ++e) {
    std::string_view kv(*e);
    const auto eq = kv.find('=');
    if (eq == std::string_view::npos || kv.substr(0, 6) != "JUDGE_") continue;
    env.emplace(std::string(kv.substr(0, eq)), std::string(kv.substr(eq + 1)));
  }
  std::optional<std::filesystem::path> file = config_file;
  if (auto it = env.find("JUDGE_CONFIG"); !file && it != env.end() && !it->second.empty()) file = it->second;
  return load_config(env, file);
}

}  // namespace judge::service

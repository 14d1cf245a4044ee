#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace judge::service {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir = "judge-data";
  int workers = 2;
  /// Sandbox-wide cap on concurrent runs; 0 means one per worker.
  int max_parallel_runs = 0;
  /// Required in X-Judge-Admin to load packages; empty disables loading
  /// over HTTP.
  std::string admin_token;
  std::int64_t max_source_bytes = 1024 * 1024;
  std::filesystem::path ui_dir;
  /// Packages registered at startup unless their id is already known.
  std::vector<std::filesystem::path> problems;
  std::filesystem::path toolchains;
  std::int64_t claim_timeout_ms = 15 * 60 * 1000;
  int max_attempts = 3;
  int snapshot_every = 200;

  std::filesystem::path journal_path() const { return data_dir / "journal.jsonl"; }
  std::filesystem::path snapshot_path() const { return data_dir / "snapshot.json"; }
};

/// JUDGE_PORT, JUDGE_DATA_DIR, JUDGE_WORKERS, JUDGE_MAX_PARALLEL_RUNS,
/// JUDGE_ADMIN_TOKEN, JUDGE_UI_DIR and JUDGE_TOOLCHAINS from `env`, then
/// the keys of the JSON `config_file` (if given) on top. FormatError on
/// unparsable values or unknown keys.
ServiceConfig load_config(const std::map<std::string, std::string>& env,
                          const std::optional<std::filesystem::path>& config_file);

/// load_config over the process environment. The config file is
/// `config_file` if given, else the one JUDGE_CONFIG names.
ServiceConfig config_from_environment(const std::optional<std::filesystem::path>& config_file = std::nullopt);

}  // namespace judge::service

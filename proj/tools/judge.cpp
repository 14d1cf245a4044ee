// judge: run a submission against a package, serve the API, generate
// facility instances and packs, replay contest journals.
#include "judge/compile/compile.hpp"
#include "judge/core/error.hpp"
#include "judge/eval/eval.hpp"
#include "judge/problem/facility.hpp"
#include "judge/problem/package.hpp"
#include "judge/scoring/scoring.hpp"
#include "judge/service/http.hpp"
#include "judge/service/pipeline.hpp"
#include "judge/service/replay.hpp"
#include "judge/service/service.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <thread>

using namespace judge;
namespace fs = std::filesystem;

namespace {

enum Exit { kAccepted = 0, kJudged = 1, kUsage = 2, kInfrastructure = 3 };

void write_out(const fs::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << data;
  if (!out) throw InfrastructureError("cannot write " + path.string());
}

std::string human_bytes(std::int64_t b) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f MiB", static_cast<double>(b) / kMiB);
  return buf;
}

struct RunArgs {
  fs::path problem;
  fs::path source;
  std::string language;
  bool json = false;
  bool stats = false;
  fs::path toolchains;
};

int cmd_run(const RunArgs& a) {
  const auto problem = problem::load_package(a.problem);
  const auto toolchains = compile::ToolchainRegistry::load(
      a.toolchains.empty() ? compile::ToolchainRegistry::default_path() : a.toolchains);
  if (a.language != "static_binary") toolchains.at(a.language);
  eval::ObjectiveRegistry objectives;
  problem::install_objectives(objectives);
  const sandbox::Sandbox box;
  const eval::Engine engine(box, toolchains, objectives);
  const auto prepared = engine.prepare(problem, a.problem);

  auto submission = service::submission_from_file(a.source, a.language);
  submission.problem_id = problem.id;
  const auto judgement = engine.judge(submission, prepared);
  auto best = scoring::BestTable::for_problem(problem);
  const auto result = service::score_judgement(problem, best, submission.id, judgement);

  if (a.json) {
    std::cout << service::result_json(result, a.stats).dump(2) << '\n';
  } else {
    std::cout << "problem " << problem.id << ", " << a.source.filename().string() << " (" << a.language << ")\n";
    for (const auto& o : result.per_instance) {
      std::cout << "  test " << o.instance_id << ": " << to_string(o.status) << "  score " << to_decimal(o.score);
      if (o.stats) {
        std::cout << "  cpu " << o.stats->cpu_time << " ms  wall " << o.stats->wall_time << " ms  mem "
                  << human_bytes(o.stats->peak_memory);
      }
      if (o.detail) std::cout << "  (" << *o.detail << ")";
      std::cout << '\n';
    }
    std::cout << to_string(result.status) << "  score " << to_decimal(result.score) << '\n';
  }
  if (judgement.compile_error) {
    std::cerr << "compile error: " << *judgement.compile_error << '\n';
    if (!judgement.compile_log.empty()) std::cerr << judgement.compile_log;
  }
  return result.status == Status::ACC ? kAccepted : kJudged;
}

struct ServeArgs {
  std::optional<int> port;
  std::optional<std::string> host;
  std::optional<fs::path> data;
  std::optional<int> workers;
  std::optional<fs::path> config;
  std::optional<fs::path> ui;
  std::vector<fs::path> problems;
};

int cmd_serve(const ServeArgs& a) {
  // Signals are taken synchronously by one thread so shutdown is orderly.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  auto config = service::config_from_environment(a.config);
  if (a.port) config.port = *a.port;
  if (a.host) config.host = *a.host;
  if (a.data) config.data_dir = *a.data;
  if (a.workers) config.workers = *a.workers;
  if (a.ui) config.ui_dir = *a.ui;
  for (const auto& p : a.problems) config.problems.push_back(p);

  service::JudgeService svc(config);
  service::HttpServer http(svc);
  const int port = http.bind(config.host, config.port);
  svc.start();
  std::cout << "listening on http://" << config.host << ":" << port << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&set, &sig);
    http.stop();
  });
  waiter.detach();
  http.serve();
  svc.stop();
  return kAccepted;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const InfrastructureError*>(&e) != nullptr) return kInfrastructure;
  if (dynamic_cast<const JudgeError*>(&e) != nullptr) return kUsage;
  return kInfrastructure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online judge: local runs, API server, facility tools, contest replay"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "judge one submission against a problem package");
  run_cmd->add_option("-p,--problem", run.problem, "problem package directory")->required();
  run_cmd->add_option("-s,--submission", run.source, "source file or static binary")->required();
  run_cmd->add_option("-l,--language", run.language, "language id, or static_binary")->required();
  run_cmd->add_flag("--json", run.json, "print the aggregate result as JSON");
  run_cmd->add_flag("--stats", run.stats, "include measured run statistics in --json output");
  run_cmd->add_option("--toolchains", run.toolchains, "toolchain registry file");

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "run the HTTP judge service");
  serve_cmd->add_option("--port", serve.port, "port (0 picks a free one)");
  serve_cmd->add_option("--host", serve.host, "address to bind");
  serve_cmd->add_option("--data", serve.data, "data directory (journal, snapshots, scratch)");
  serve_cmd->add_option("--workers", serve.workers, "evaluation workers");
  serve_cmd->add_option("--config", serve.config, "JSON config file (overrides the environment)");
  serve_cmd->add_option("--ui", serve.ui, "static UI directory served under /ui");
  serve_cmd->add_option("--problem", serve.problems, "package to register at startup (repeatable)");

  int w = 0, h = 0, k = 0;
  std::uint64_t seed = 0;
  fs::path gen_out;
  auto* gen_cmd = app.add_subcommand("gen-facility", "write a random facility instance");
  gen_cmd->add_option("W", w, "grid width")->required();
  gen_cmd->add_option("H", h, "grid height")->required();
  gen_cmd->add_option("K", k, "factory count")->required();
  gen_cmd->add_option("--seed", seed, "generator seed")->required();
  gen_cmd->add_option("-o,--output", gen_out, "output .in file")->required();

  problem::FacilityPackOptions pack;
  fs::path pack_dir;
  auto* pack_cmd = app.add_subcommand("make-facility-pack", "write a facility problem package");
  pack_cmd->add_option("DIR", pack_dir, "output directory")->required();
  pack_cmd->add_option("--seed", pack.seed, "pack seed");
  pack_cmd->add_option("--instances", pack.instances, "number of instances");
  pack_cmd->add_option("--min-side", pack.min_side, "smallest grid side");
  pack_cmd->add_option("--max-side", pack.max_side, "largest grid side");

  fs::path journal, csv_out;
  std::optional<fs::path> svg_out;
  std::optional<std::string> replay_problem;
  auto* replay_cmd = app.add_subcommand("replay", "contest time series from a journal");
  replay_cmd->add_option("JOURNAL", journal, "journal.jsonl")->required();
  replay_cmd->add_option("-o,--output", csv_out, "CSV output")->required();
  replay_cmd->add_option("--plot", svg_out, "SVG plot output");
  replay_cmd->add_option("--problem", replay_problem, "problem id (needed when the journal has several)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kAccepted : kUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*serve_cmd) return cmd_serve(serve);
    if (*gen_cmd) {
      write_out(gen_out, problem::write_facility_input(problem::gen_facility(w, h, k, seed)));
      return kAccepted;
    }
    if (*pack_cmd) {
      problem::write_package(problem::make_facility_problem(pack), pack_dir);
      return kAccepted;
    }
    if (*replay_cmd) {
      const auto rows = service::replay_contest(journal, replay_problem);
      write_out(csv_out, service::replay_csv(rows));
      if (svg_out) write_out(*svg_out, service::replay_svg(rows, "Contest replay"));
      return kAccepted;
    }
  } catch (const PackageMalformed& e) {
    std::cerr << "judge: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "judge: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kUsage;
}

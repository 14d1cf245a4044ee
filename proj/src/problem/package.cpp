#include "judge/problem/package.hpp"

#include "judge/core/codec.hpp"
#include "judge/core/error.hpp"
#include "judge/core/validate.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace judge::problem {

namespace fs = std::filesystem;

namespace {

std::optional<std::string> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, std::string_view data) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw InfrastructureError("cannot write " + p.string());
}

int pad_width(std::size_t count) { return std::max<int>(2, static_cast<int>(std::to_string(count).size())); }

std::string test_name(int index, int width) {
  std::string n = std::to_string(index);
  return std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(n.size()))), '0') + n;
}

struct TestFiles {
  bool in = false, out = false, params = false;
};

}  // namespace

Problem load_package(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw PackageMalformed({root.string() + ": not a directory"});

  std::vector<std::string> diags;
  Problem problem;
  Json manifest;
  if (auto text = slurp(root / "manifest.json")) {
    try {
      manifest = Json::parse(*text);
      if (!manifest.is_object()) throw FormatError("top level must be an object");
      problem.id = manifest.at("id").get<std::string>();
      problem.kind = manifest.at("kind").get<ProblemKind>();
      problem.direction = manifest.value("direction", Json("none")).get<Direction>();
      problem.policy = manifest.at("policy").get<ScoringPolicy>();
      problem.limits = manifest.value("limits", Json::object()).get<ResourceLimits>();
      if (manifest.contains("checker")) problem.checker = manifest.at("checker").get<CheckerSpec>();
      if (manifest.contains("alphabet")) problem.alphabet = manifest.at("alphabet").get<Alphabet>();
      if (manifest.contains("visibility")) problem.visibility = manifest.at("visibility").get<Visibility>();
    } catch (const std::exception& e) {
      diags.push_back(std::string("manifest.json: ") + e.what());
    }
  } else {
    diags.push_back("manifest.json: missing");
  }

  if (auto text = slurp(root / "statement.md")) {
    problem.statement = std::move(*text);
  } else {
    diags.push_back("statement.md: missing");
  }

  if (problem.checker.kind == CheckerKind::external && !problem.checker.source.empty() &&
      !fs::is_regular_file(root / problem.checker.source, ec)) {
    diags.push_back(problem.checker.source + ": checker source missing");
  }

  std::map<int, TestFiles> tests;
  const fs::path tests_dir = root / "tests";
  if (!fs::is_directory(tests_dir, ec)) {
    diags.push_back("tests/: missing");
  } else {
    for (const auto& entry : fs::directory_iterator(tests_dir)) {
      const std::string name = entry.path().filename().string();
      const auto dot = name.find('.');
      const std::string stem = name.substr(0, dot);
      const std::string ext = dot == std::string::npos ? "" : name.substr(dot);
      const bool digits = !stem.empty() && stem.find_first_not_of("0123456789") == std::string::npos;
      if (!digits || (ext != ".in" && ext != ".out" && ext != ".params.json")) {
        diags.push_back("tests/" + name + ": unexpected file");
        continue;
      }
      auto& t = tests[std::stoi(stem.size() > 6 ? "999999" : stem)];
      (ext == ".in" ? t.in : ext == ".out" ? t.out : t.params) = true;
    }
  }

  const int count = tests.empty() ? 0 : tests.rbegin()->first;
  const int width = pad_width(static_cast<std::size_t>(count));
  // Names must round-trip through the padding rule.
  for (const auto& entry : fs::directory_iterator(tests_dir, ec)) {
    const std::string name = entry.path().filename().string();
    const std::string stem = name.substr(0, name.find('.'));
    if (stem.find_first_not_of("0123456789") != std::string::npos || stem.empty()) continue;
    if (stem.size() <= 6 && stem != test_name(std::stoi(stem), width)) {
      diags.push_back("tests/" + name + ": expected " + std::to_string(width) + "-digit zero-padded number");
    }
  }
  if (tests.empty() && fs::is_directory(tests_dir, ec)) diags.push_back("tests/: no instances");

  const Json* meta = nullptr;
  if (manifest.is_object() && manifest.contains("instances")) {
    meta = &manifest.at("instances");
    if (!meta->is_array() || static_cast<int>(meta->size()) != count) {
      diags.push_back("manifest.json: instances lists " + std::to_string(meta->is_array() ? meta->size() : 0) +
                      " entries, tests/ has " + std::to_string(count));
      meta = nullptr;
    }
  }

  const Json default_params = problem.limits.default_params();
  for (int i = 1; i <= count; ++i) {
    const std::string nn = "tests/" + test_name(i, width);
    const auto it = tests.find(i);
    const TestFiles files = it == tests.end() ? TestFiles{} : it->second;
    if (!files.in) {
      diags.push_back(nn + ".in: missing (instances are numbered contiguously from 01)");
      continue;
    }
    TestInstance t;
    t.id = i;
    t.input = slurp(root / (nn + ".in")).value_or("");
    const bool wants_out = problem.checker.kind == CheckerKind::token_exact;
    if (files.out) {
      if (problem.checker.kind == CheckerKind::objective) {
        diags.push_back(nn + ".out: objective-checked problems take no reference output");
      }
      t.reference_output = slurp(root / (nn + ".out"));
    } else if (wants_out) {
      diags.push_back(nn + ".out: missing (token_exact needs a reference output)");
    }
    t.params = problem.limits.default_params();
    t.max_points = problem.policy.kind == PolicyKind::binary_icpc ? 0 : 1;
    if (files.params) {
      try {
        Json merged = default_params;
        const Json overrides = Json::parse(slurp(root / (nn + ".params.json")).value_or(""));
        if (!overrides.is_object()) throw FormatError("must be an object");
        merged.update(overrides);
        t.params = merged.get<EvalParams>();
      } catch (const std::exception& e) {
        diags.push_back(nn + ".params.json: " + e.what());
      }
    }
    if (meta != nullptr) {
      try {
        const Json& m = meta->at(static_cast<std::size_t>(i - 1));
        if (m.contains("max_points")) t.max_points = rational_from_json(m.at("max_points"));
        if (m.contains("reference_score") && !m.at("reference_score").is_null()) {
          t.reference_score = rational_from_json(m.at("reference_score"));
        }
      } catch (const std::exception& e) {
        diags.push_back("manifest.json: instances[" + std::to_string(i - 1) + "]: " + e.what());
      }
    }
    problem.instances.push_back(std::move(t));
  }

  if (diags.empty()) {
    for (auto& v : validate_problem(problem)) diags.push_back("manifest.json: " + v);
  }
  if (!diags.empty()) throw PackageMalformed(std::move(diags));
  return problem;
}

void write_package(const Problem& problem, const fs::path& root) {
  fs::create_directories(root / "tests");
  Json manifest = {{"id", problem.id},
                   {"kind", problem.kind},
                   {"direction", problem.direction},
                   {"policy", problem.policy},
                   {"limits", problem.limits},
                   {"checker", problem.checker},
                   {"alphabet", problem.alphabet},
                   {"visibility", problem.visibility}};
  Json instances = Json::array();
  const int width = pad_width(problem.instances.size());
  const EvalParams defaults = problem.limits.default_params();
  for (std::size_t i = 0; i < problem.instances.size(); ++i) {
    const auto& t = problem.instances[i];
    instances.push_back({{"max_points", rational_to_json(t.max_points)},
                         {"reference_score", t.reference_score ? rational_to_json(*t.reference_score) : Json()}});
    const fs::path base = root / "tests" / test_name(static_cast<int>(i) + 1, width);
    spit(base.string() + ".in", t.input);
    if (t.reference_output) spit(base.string() + ".out", *t.reference_output);
    if (t.params != defaults) spit(base.string() + ".params.json", Json(t.params).dump(2) + "\n");
  }
  manifest["instances"] = std::move(instances);
  spit(root / "manifest.json", manifest.dump(2) + "\n");
  spit(root / "statement.md", problem.statement);
}

}  // namespace judge::problem

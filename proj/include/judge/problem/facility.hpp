#pragma once

#include "judge/core/model.hpp"
#include "judge/eval/eval.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace judge::problem {

inline constexpr int kFacilityMaxSide = 1000;
inline constexpr int kFacilityMinFactories = 3;
inline constexpr int kFacilityMaxFactories = 50;

/// A W×H grid of discontent values and the factories' radii.
struct FacilityInstance {
  int width = 0;
  int height = 0;
  std::vector<int> radii;
  /// Row-major, `height` rows of `width` values.
  std::vector<std::int64_t> cost;

  int factories() const noexcept { return static_cast<int>(radii.size()); }
  std::int64_t at(int x, int y) const { return cost[static_cast<std::size_t>(y) * width + x]; }

  friend bool operator==(const FacilityInstance&, const FacilityInstance&) = default;
};

struct Center {
  std::int64_t x = 0;
  std::int64_t y = 0;

  friend auto operator<=>(const Center&, const Center&) = default;
};

struct FacilityPlacement {
  std::vector<Center> centers;

  friend bool operator==(const FacilityPlacement&, const FacilityPlacement&) = default;
};

/// `W H K`, then the radii, then H rows of W values; single spaces, each
/// line newline-terminated.
std::string write_facility_input(const FacilityInstance& instance);
/// FormatError on anything that does not describe a well-formed grid.
FacilityInstance parse_facility_input(std::string_view text);

std::string write_facility_output(const FacilityPlacement& placement);

struct ParsedPlacement {
  bool ok = false;
  FacilityPlacement placement;
  std::string detail;
};

/// Reads a contestant's output as whitespace-separated integer pairs.
/// Never throws; garbage comes back with ok = false and a detail.
ParsedPlacement parse_facility_output(std::string_view text);

struct Feasibility {
  bool feasible = false;
  std::string detail;
};

/// Center count and grid bounds; the detail names the first violation.
Feasibility facility_feasible(const FacilityInstance& instance, const FacilityPlacement& placement);

/// Σ c(x, y) over cells within Euclidean distance r_i of center i for some
/// i, each cell counted once. The placement must be feasible.
std::int64_t facility_objective(const FacilityInstance& instance, const FacilityPlacement& placement);

struct BruteForceResult {
  std::int64_t optimum = 0;
  /// First minimizing placement in enumeration order.
  FacilityPlacement argmin;
};

inline constexpr int kBruteForceMaxCells = 64;
inline constexpr int kBruteForceMaxFactories = 2;

/// Exhaustive minimum over all placements (repetition allowed).
/// BudgetExceeded unless W·H ≤ 64 and K ≤ 2.
BruteForceResult facility_brute_force(const FacilityInstance& instance);

/// Random instance: c uniform on [0, 255], radii uniform on
/// [0, min(W, H) / 4]. Same arguments, same instance. BoundsError outside
/// 1 ≤ W, H ≤ 1000 or 3 ≤ K ≤ 50.
FacilityInstance gen_facility(int width, int height, int factories, std::uint64_t seed);

/// Factories in decreasing-radius order (stable), each at the center that
/// adds the least newly covered discontent; ties go to the smallest (y, x).
/// Every placement covers some disc of the largest radius, and smaller
/// circles nested at its center add nothing, so this is optimal.
FacilityPlacement facility_greedy(const FacilityInstance& instance);

/// Objective checker over the instance's input bytes; registered as
/// "facility".
eval::ObjectiveResult facility_check(std::string_view output, const TestInstance& instance,
                                     const Problem& problem);

/// Adds the objectives this module provides to `registry`.
void install_objectives(eval::ObjectiveRegistry& registry);

struct FacilityPackOptions {
  std::string problem_id = "facility";
  std::uint64_t seed = 2018;
  int instances = 10;
  int min_side = 20;
  int max_side = 80;
  std::int64_t time_limit = 10'000;
  std::int64_t memory_limit = kGiB;
};

/// A complete optimization problem: generated instances, "facility"
/// objective checker, reference scores from facility_greedy.
Problem make_facility_problem(const FacilityPackOptions& options);

}  // namespace judge::problem

#include "judge/problem/facility.hpp"

#include "judge/core/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <random>

namespace judge::problem {

namespace {

/// floor(sqrt(r² − dy²)), exactly.
std::int64_t half_width(std::int64_t r, std::int64_t dy) {
  const std::int64_t rem = r * r - dy * dy;
  if (rem < 0) return -1;
  auto w = static_cast<std::int64_t>(std::sqrt(static_cast<double>(rem)));
  while (w * w > rem) --w;
  while ((w + 1) * (w + 1) <= rem) ++w;
  return w;
}

std::vector<std::string_view> split_ws(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  auto space = [](char c) { return c == ' ' || c == '\n' || c == '\r' || c == '\t'; };
  while (i < text.size()) {
    while (i < text.size() && space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !space(text[i])) ++i;
    if (i > start) out.push_back(text.substr(start, i - start));
  }
  return out;
}

std::optional<std::int64_t> to_int(std::string_view token) {
  std::int64_t v = 0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return v;
}

/// Cells covered by the circle around `c`, as [x0, x1] spans per row.
template <class Fn>
void for_each_span(const FacilityInstance& inst, Center c, std::int64_t r, Fn&& fn) {
  const std::int64_t y0 = std::max<std::int64_t>(0, c.y - r);
  const std::int64_t y1 = std::min<std::int64_t>(inst.height - 1, c.y + r);
  for (std::int64_t y = y0; y <= y1; ++y) {
    const std::int64_t hw = half_width(r, y - c.y);
    const std::int64_t x0 = std::max<std::int64_t>(0, c.x - hw);
    const std::int64_t x1 = std::min<std::int64_t>(inst.width - 1, c.x + hw);
    if (x0 <= x1) fn(static_cast<int>(y), static_cast<int>(x0), static_cast<int>(x1));
  }
}

/// Row prefix sums of the cost of cells for which `open(index)` holds.
template <class Open>
std::vector<std::int64_t> open_prefix(const FacilityInstance& inst, Open&& open) {
  const std::size_t stride = static_cast<std::size_t>(inst.width) + 1;
  std::vector<std::int64_t> prefix(stride * inst.height, 0);
  for (int y = 0; y < inst.height; ++y) {
    for (int x = 0; x < inst.width; ++x) {
      const std::size_t cell = static_cast<std::size_t>(y) * inst.width + x;
      prefix[y * stride + x + 1] = prefix[y * stride + x] + (open(cell) ? inst.cost[cell] : 0);
    }
  }
  return prefix;
}

/// Cost of the open cells a radius-r circle at (x, y) would cover.
std::int64_t disc_sum(const FacilityInstance& inst, const std::vector<std::int64_t>& prefix,
                      const std::vector<std::int64_t>& widths, std::int64_t r, int x, int y) {
  const std::size_t stride = static_cast<std::size_t>(inst.width) + 1;
  std::int64_t total = 0;
  const std::int64_t y0 = std::max<std::int64_t>(0, y - r);
  const std::int64_t y1 = std::min<std::int64_t>(inst.height - 1, y + r);
  for (std::int64_t yy = y0; yy <= y1; ++yy) {
    const std::int64_t hw = widths[static_cast<std::size_t>(std::abs(yy - y))];
    const std::int64_t x0 = std::max<std::int64_t>(0, x - hw);
    const std::int64_t x1 = std::min<std::int64_t>(inst.width - 1, x + hw);
    if (x0 > x1) continue;
    const auto* row = prefix.data() + yy * stride;
    total += row[x1 + 1] - row[x0];
  }
  return total;
}

std::vector<std::int64_t> widths_for(const FacilityInstance& inst, std::int64_t r) {
  const std::int64_t rows = std::min<std::int64_t>(r, inst.height);
  std::vector<std::int64_t> w(static_cast<std::size_t>(rows) + 1);
  for (std::int64_t dy = 0; dy <= rows; ++dy) w[dy] = half_width(r, dy);
  return w;
}

struct Best {
  std::int64_t cost = std::numeric_limits<std::int64_t>::max();
  Center at;
};

/// Cheapest center for a radius-r circle; row-major scan keeps the
/// smallest (y, x) on ties.
Best best_center(const FacilityInstance& inst, const std::vector<std::int64_t>& prefix, std::int64_t r) {
  const auto widths = widths_for(inst, r);
  Best best;
  for (int y = 0; y < inst.height; ++y) {
    for (int x = 0; x < inst.width; ++x) {
      const std::int64_t cost = disc_sum(inst, prefix, widths, r, x, y);
      if (cost < best.cost) best = Best{cost, Center{x, y}};
    }
  }
  return best;
}

/// Uniform on [lo, hi] by rejection, independent of the standard library's
/// distribution implementations.
std::int64_t uniform(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(rng());
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return lo + static_cast<std::int64_t>(v % span);
}

/// Centers whose radius-r circle holds no positive cell; these allow an
/// all-zero placement for the largest factory.
std::vector<Center> zero_discs(const FacilityInstance& inst, std::int64_t r) {
  std::vector<Center> out;
  for (int y = 0; y < inst.height; ++y) {
    for (int x = 0; x < inst.width; ++x) {
      if (inst.at(x, y) != 0) continue;
      bool positive = false;
      const std::int64_t y0 = std::max<std::int64_t>(0, y - r);
      const std::int64_t y1 = std::min<std::int64_t>(inst.height - 1, y + r);
      for (std::int64_t yy = y0; yy <= y1 && !positive; ++yy) {
        const std::int64_t hw = half_width(r, yy - y);
        const std::int64_t x0 = std::max<std::int64_t>(0, x - hw);
        const std::int64_t x1 = std::min<std::int64_t>(inst.width - 1, x + hw);
        for (std::int64_t xx = x0; xx <= x1; ++xx) {
          if (inst.at(static_cast<int>(xx), static_cast<int>(yy)) != 0) {
            positive = true;
            break;
          }
        }
      }
      if (!positive) out.push_back(Center{x, y});
    }
  }
  return out;
}

}  // namespace

std::string write_facility_input(const FacilityInstance& inst) {
  std::string out;
  out += std::to_string(inst.width) + ' ' + std::to_string(inst.height) + ' ' +
         std::to_string(inst.factories()) + '\n';
  for (std::size_t i = 0; i < inst.radii.size(); ++i) {
    if (i > 0) out += ' ';
    out += std::to_string(inst.radii[i]);
  }
  out += '\n';
  for (int y = 0; y < inst.height; ++y) {
    for (int x = 0; x < inst.width; ++x) {
      if (x > 0) out += ' ';
      out += std::to_string(inst.at(x, y));
    }
    out += '\n';
  }
  return out;
}

FacilityInstance parse_facility_input(std::string_view text) {
  const auto tokens = split_ws(text);
  std::size_t pos = 0;
  auto next = [&](const char* what) {
    if (pos >= tokens.size()) throw FormatError(std::string("facility input ends before ") + what);
    auto v = to_int(tokens[pos]);
    if (!v) {
      throw FormatError("facility input token " + std::to_string(pos + 1) + " is not an integer");
    }
    ++pos;
    return *v;
  };
  FacilityInstance inst;
  const auto w = next("width");
  const auto h = next("height");
  const auto k = next("factory count");
  if (w < 1 || w > kFacilityMaxSide || h < 1 || h > kFacilityMaxSide) {
    throw FormatError("facility grid " + std::to_string(w) + "x" + std::to_string(h) + " out of range");
  }
  if (k < 1 || k > kFacilityMaxFactories) {
    throw FormatError("facility factory count " + std::to_string(k) + " out of range");
  }
  inst.width = static_cast<int>(w);
  inst.height = static_cast<int>(h);
  for (std::int64_t i = 0; i < k; ++i) {
    const auto r = next("radii");
    if (r < 0 || r > std::numeric_limits<int>::max()) throw FormatError("facility radius out of range");
    inst.radii.push_back(static_cast<int>(r));
  }
  inst.cost.reserve(static_cast<std::size_t>(w * h));
  for (std::int64_t i = 0; i < w * h; ++i) {
    const auto c = next("grid");
    if (c < 0) throw FormatError("negative discontent value");
    inst.cost.push_back(c);
  }
  if (pos != tokens.size()) throw FormatError("trailing data after facility grid");
  return inst;
}

std::string write_facility_output(const FacilityPlacement& placement) {
  std::string out;
  for (const auto& c : placement.centers) out += std::to_string(c.x) + ' ' + std::to_string(c.y) + '\n';
  return out;
}

ParsedPlacement parse_facility_output(std::string_view text) {
  ParsedPlacement r;
  const auto tokens = split_ws(text);
  std::vector<std::int64_t> values;
  values.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto v = to_int(tokens[i]);
    if (!v) {
      std::string shown(tokens[i].substr(0, 32));
      r.detail = "output of unknown format: token " + std::to_string(i + 1) + " '" + shown +
                 "' is not an integer";
      return r;
    }
    values.push_back(*v);
  }
  if (values.size() % 2 != 0) {
    r.detail = "output of unknown format: odd number of coordinates (" + std::to_string(values.size()) + ")";
    return r;
  }
  for (std::size_t i = 0; i < values.size(); i += 2) r.placement.centers.push_back({values[i], values[i + 1]});
  r.ok = true;
  return r;
}

Feasibility facility_feasible(const FacilityInstance& inst, const FacilityPlacement& placement) {
  const auto n = placement.centers.size();
  if (n != inst.radii.size()) {
    return {false, "expected " + std::to_string(inst.radii.size()) + " centers, got " + std::to_string(n)};
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = placement.centers[i];
    const char* axis = nullptr;
    if (c.x < 0 || c.x >= inst.width) {
      axis = "x";
    } else if (c.y < 0 || c.y >= inst.height) {
      axis = "y";
    }
    if (axis != nullptr) {
      return {false, "center " + std::to_string(i + 1) + " (" + std::to_string(c.x) + ", " +
                         std::to_string(c.y) + ") out of bounds: " + axis + " out of range"};
    }
  }
  return {true, {}};
}

std::int64_t facility_objective(const FacilityInstance& inst, const FacilityPlacement& placement) {
  std::vector<char> covered(inst.cost.size(), 0);
  for (std::size_t i = 0; i < placement.centers.size() && i < inst.radii.size(); ++i) {
    for_each_span(inst, placement.centers[i], inst.radii[i], [&](int y, int x0, int x1) {
      std::fill_n(covered.begin() + static_cast<std::ptrdiff_t>(y) * inst.width + x0, x1 - x0 + 1, 1);
    });
  }
  std::int64_t total = 0;
  for (std::size_t i = 0; i < covered.size(); ++i) {
    if (covered[i]) total += inst.cost[i];
  }
  return total;
}

BruteForceResult facility_brute_force(const FacilityInstance& inst) {
  const std::int64_t cells = static_cast<std::int64_t>(inst.width) * inst.height;
  if (cells > kBruteForceMaxCells || inst.factories() > kBruteForceMaxFactories || inst.factories() < 1) {
    throw BudgetExceeded("brute force needs W*H <= " + std::to_string(kBruteForceMaxCells) + " and K <= " +
                         std::to_string(kBruteForceMaxFactories) + ", got " + std::to_string(cells) +
                         " cells and K = " + std::to_string(inst.factories()));
  }
  // Direct distance test per cell; shares nothing with facility_objective.
  auto value = [&](const std::vector<Center>& centers) {
    std::int64_t total = 0;
    for (int y = 0; y < inst.height; ++y) {
      for (int x = 0; x < inst.width; ++x) {
        for (std::size_t i = 0; i < centers.size(); ++i) {
          const std::int64_t dx = x - centers[i].x, dy = y - centers[i].y;
          const std::int64_t r = inst.radii[i];
          if (dx * dx + dy * dy <= r * r) {
            total += inst.at(x, y);
            break;
          }
        }
      }
    }
    return total;
  };
  const int k = inst.factories();
  std::vector<std::int64_t> index(k, 0);
  BruteForceResult best;
  best.optimum = std::numeric_limits<std::int64_t>::max();
  while (true) {
    std::vector<Center> centers;
    for (auto i : index) centers.push_back({i % inst.width, i / inst.width});
    const auto v = value(centers);
    if (v < best.optimum) best = {v, FacilityPlacement{centers}};
    int d = k - 1;
    while (d >= 0 && ++index[d] == cells) index[d--] = 0;
    if (d < 0) break;
  }
  return best;
}

FacilityInstance gen_facility(int width, int height, int factories, std::uint64_t seed) {
  if (width < 1 || width > kFacilityMaxSide || height < 1 || height > kFacilityMaxSide) {
    throw BoundsError("grid " + std::to_string(width) + "x" + std::to_string(height) +
                      " outside 1.." + std::to_string(kFacilityMaxSide));
  }
  if (factories < kFacilityMinFactories || factories > kFacilityMaxFactories) {
    throw BoundsError("factory count " + std::to_string(factories) + " outside " +
                      std::to_string(kFacilityMinFactories) + ".." + std::to_string(kFacilityMaxFactories));
  }
  std::mt19937_64 rng(seed);
  FacilityInstance inst;
  inst.width = width;
  inst.height = height;
  const int max_radius = std::min(width, height) / 4;
  for (int i = 0; i < factories; ++i) inst.radii.push_back(static_cast<int>(uniform(rng, 0, max_radius)));
  inst.cost.resize(static_cast<std::size_t>(width) * height);
  for (auto& c : inst.cost) c = uniform(rng, 0, 255);

  // Keep every placement's objective positive: the largest circle must
  // always catch a nonzero cell.
  const int r = *std::max_element(inst.radii.begin(), inst.radii.end());
  for (int round = 0;; ++round) {
    const auto bad = zero_discs(inst, r);
    if (bad.empty()) break;
    for (const auto& c : bad) {
      for_each_span(inst, c, r, [&](int y, int x0, int x1) {
        for (int x = x0; x <= x1; ++x) {
          auto& cell = inst.cost[static_cast<std::size_t>(y) * width + x];
          if (cell == 0) cell = round < 8 ? uniform(rng, 0, 255) : 1;
        }
      });
    }
  }
  return inst;
}

FacilityPlacement facility_greedy(const FacilityInstance& inst) {
  std::vector<int> order(inst.radii.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return inst.radii[a] > inst.radii[b]; });

  std::vector<char> covered(inst.cost.size(), 0);
  FacilityPlacement placement;
  placement.centers.resize(inst.radii.size());
  for (int i : order) {
    const auto prefix = open_prefix(inst, [&](std::size_t cell) { return !covered[cell]; });
    const auto best = best_center(inst, prefix, inst.radii[i]);
    placement.centers[i] = best.at;
    for_each_span(inst, best.at, inst.radii[i], [&](int y, int x0, int x1) {
      std::fill_n(covered.begin() + static_cast<std::ptrdiff_t>(y) * inst.width + x0, x1 - x0 + 1, 1);
    });
  }
  return placement;
}

eval::ObjectiveResult facility_check(std::string_view output, const TestInstance& instance, const Problem&) {
  FacilityInstance inst;
  try {
    inst = parse_facility_input(instance.input);
  } catch (const FormatError& e) {
    throw InfrastructureError("instance " + std::to_string(instance.id) + ": " + e.what());
  }
  eval::ObjectiveResult r;
  auto parsed = parse_facility_output(output);
  if (!parsed.ok) {
    r.detail = std::move(parsed.detail);
    return r;
  }
  auto feasible = facility_feasible(inst, parsed.placement);
  if (!feasible.feasible) {
    r.detail = std::move(feasible.detail);
    return r;
  }
  r.feasible = true;
  r.objective = Rational(facility_objective(inst, parsed.placement));
  return r;
}

void install_objectives(eval::ObjectiveRegistry& registry) { registry.add("facility", facility_check); }

namespace {

constexpr std::string_view kFacilityStatement = R"(# Factory placement

A city is a grid of W by H points. Point (x, y) has a discontent value
c(x, y) >= 0: how unhappy the people living there would be to have a
factory nearby. You must place K factories; factory i has influence
radius r_i. A point is affected when its Euclidean distance to some
factory i is at most r_i. Minimize the total discontent of affected
points. A point affected by several factories counts once. Factories may
share a location.

## Input

    W H K
    r_1 r_2 ... r_K
    c(0, 0) c(1, 0) ... c(W-1, 0)
    ...
    c(0, H-1) ... c(W-1, H-1)

1 <= W, H <= 1000, 3 <= K <= 50, 0 <= c <= 255.

## Output

K lines, line i holding `x_i y_i` with 0 <= x_i < W and 0 <= y_i < H.

## Scoring

Each test scores b_i / v_i, where v_i is your total discontent and b_i
the best value known for that test. The problem score is 100 times the
mean over all tests; a test that fails scores 0. Best values improve as
submissions beat them, so scores can drop over time.
)";

}  // namespace

Problem make_facility_problem(const FacilityPackOptions& options) {
  if (options.instances < 1) throw BoundsError("a pack needs at least one instance");
  if (options.min_side < 1 || options.max_side > kFacilityMaxSide || options.min_side > options.max_side) {
    throw BoundsError("pack side range out of bounds");
  }
  std::mt19937_64 rng(options.seed);
  Problem p;
  p.id = options.problem_id;
  p.kind = ProblemKind::optimization;
  p.direction = Direction::minimize;
  p.policy.kind = PolicyKind::optimization_normalized;
  p.limits.time_limit = options.time_limit;
  p.limits.memory_limit = options.memory_limit;
  p.checker.kind = CheckerKind::objective;
  p.checker.objective = "facility";
  p.alphabet = Alphabet::digits();
  p.statement = std::string(kFacilityStatement);
  for (int i = 0; i < options.instances; ++i) {
    const auto w = static_cast<int>(uniform(rng, options.min_side, options.max_side));
    const auto h = static_cast<int>(uniform(rng, options.min_side, options.max_side));
    const auto k = static_cast<int>(uniform(rng, kFacilityMinFactories, kFacilityMaxFactories));
    const auto inst = gen_facility(w, h, k, rng());
    TestInstance t;
    t.id = i + 1;
    t.input = write_facility_input(inst);
    t.params = p.limits.default_params();
    t.max_points = 1;
    t.reference_score = Rational(facility_objective(inst, facility_greedy(inst)));
    p.instances.push_back(std::move(t));
  }
  return p;
}

}  // namespace judge::problem

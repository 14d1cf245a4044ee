#pragma once

#include "judge/core/rational.hpp"
#include "judge/core/status.hpp"

#include <array>
#include <bitset>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace judge {

/// Raw byte sequences (test data, program output, binaries).
using Bytes = std::string;

inline constexpr std::int64_t kKiB = 1024;
inline constexpr std::int64_t kMiB = 1024 * kKiB;
inline constexpr std::int64_t kGiB = 1024 * kMiB;

enum class ProblemKind { decision, search, optimization };
enum class Direction { maximize, minimize, none };
enum class PolicyKind { binary_icpc, ioi_sum, ioi_time_penalty, optimization_normalized };
enum class CheckerKind { token_exact, objective, external };

std::string_view to_string(ProblemKind k) noexcept;
std::string_view to_string(Direction d) noexcept;
std::string_view to_string(PolicyKind p) noexcept;
std::string_view to_string(CheckerKind c) noexcept;

struct ScoringPolicy {
  PolicyKind kind = PolicyKind::binary_icpc;
  /// Aggregate to RE as soon as any instance hit a runtime error.
  bool re_priority = false;

  friend bool operator==(const ScoringPolicy&, const ScoringPolicy&) = default;
};

/// p_i. `extra` holds problem-declared parameters beyond the resource
/// limits; `passthrough` is the subset p_i' that the solution gets to see.
struct EvalParams {
  std::int64_t time_limit = 1000;  // ms
  std::int64_t memory_limit = 256 * kMiB;
  std::int64_t output_limit = 64 * kMiB;
  std::optional<std::uint64_t> rng_seed;
  std::map<std::string, std::string> extra;
  std::vector<std::pair<std::string, std::string>> passthrough;

  friend bool operator==(const EvalParams&, const EvalParams&) = default;
};

/// Param names a passthrough entry may reference besides `extra` keys.
inline constexpr std::array<std::string_view, 4> kBuiltinParamNames{
    "time_limit", "memory_limit", "output_limit", "rng_seed"};

struct ResourceLimits {
  std::int64_t compile_time = 60'000;  // ms
  std::int64_t binary_size = 256 * kMiB;
  std::int64_t time_limit = 1000;  // ms
  std::int64_t memory_limit = 256 * kMiB;
  std::int64_t output_limit = 64 * kMiB;

  EvalParams default_params() const {
    EvalParams p;
    p.time_limit = time_limit;
    p.memory_limit = memory_limit;
    p.output_limit = output_limit;
    return p;
  }

  friend bool operator==(const ResourceLimits&, const ResourceLimits&) = default;
};

/// Σ: the byte allowlist reference data must stay within. In csv mode the
/// token checker also splits on commas.
struct Alphabet {
  std::string name = "digits";
  std::bitset<256> allowed;
  bool csv = false;

  static Alphabet digits();
  static Alphabet csv_values();
  static Alphabet text();
  static Alphabet custom(std::string_view chars);
  static Alphabet named(std::string_view name);

  bool contains(unsigned char c) const noexcept { return allowed.test(c); }
  /// Position of the first byte outside the alphabet, if any.
  std::optional<std::size_t> first_violation(std::string_view data) const noexcept;
  /// The allowed bytes in ascending order (used by the custom encoding).
  std::string chars() const;

  friend bool operator==(const Alphabet&, const Alphabet&) = default;
};

struct CheckerSpec {
  CheckerKind kind = CheckerKind::token_exact;
  bool byte_exact = false;
  /// Registered objective name (objective checkers).
  std::string objective;
  /// Checker source inside the package and its toolchain (external checkers).
  std::string source;
  std::string language_id;

  friend bool operator==(const CheckerSpec&, const CheckerSpec&) = default;
};

struct Visibility {
  bool instance_status = true;
  std::optional<bool> instance_score;  // unset: visible for optimization problems
  bool wa_detail = false;

  friend bool operator==(const Visibility&, const Visibility&) = default;
};

/// t_i = (d_i, o_i, p_i) plus the IOI points V_i.
struct TestInstance {
  int id = 0;
  Bytes input;
  std::optional<Bytes> reference_output;
  EvalParams params;
  Rational max_points = 0;
  /// Author-supplied objective value used to seed the best table.
  std::optional<Rational> reference_score;

  friend bool operator==(const TestInstance&, const TestInstance&) = default;
};

struct Problem {
  std::string id;
  ProblemKind kind = ProblemKind::decision;
  Direction direction = Direction::none;
  std::vector<TestInstance> instances;
  ScoringPolicy policy;
  ResourceLimits limits;
  std::string statement;
  CheckerSpec checker;
  Alphabet alphabet = Alphabet::digits();
  Visibility visibility;

  bool show_instance_scores() const {
    return visibility.instance_score.value_or(kind == ProblemKind::optimization);
  }

  friend bool operator==(const Problem&, const Problem&) = default;
};

struct SourceFile {
  std::string name;
  Bytes data;

  friend bool operator==(const SourceFile&, const SourceFile&) = default;
};

struct SourcePayload {
  std::string language_id;
  std::vector<SourceFile> files;

  friend bool operator==(const SourcePayload&, const SourcePayload&) = default;
};

struct BinaryPayload {
  Bytes data;

  friend bool operator==(const BinaryPayload&, const BinaryPayload&) = default;
};

using Payload = std::variant<SourcePayload, BinaryPayload>;

struct Submission {
  std::string id;
  std::string problem_id;
  std::string user_id;
  Payload payload;
  std::int64_t submitted_at = 0;  // ms since epoch

  friend bool operator==(const Submission&, const Submission&) = default;
};

struct ExitInfo {
  enum class Kind { code, signaled };
  Kind kind = Kind::code;
  int value = 0;

  static ExitInfo code(int c) { return {Kind::code, c}; }
  static ExitInfo signaled(int s) { return {Kind::signaled, s}; }
  bool clean() const noexcept { return kind == Kind::code && value == 0; }

  friend bool operator==(const ExitInfo&, const ExitInfo&) = default;
};

/// e_i. Times in milliseconds, memory in bytes.
struct ExecStats {
  std::int64_t cpu_time = 0;
  std::int64_t wall_time = 0;
  std::int64_t peak_memory = 0;
  std::int64_t output_bytes = 0;
  ExitInfo exit;

  friend bool operator==(const ExecStats&, const ExecStats&) = default;
};

/// (s_i, v_i, e_i).
struct InstanceOutcome {
  int instance_id = 0;
  Status status = Status::ACC;
  Rational score = 0;
  std::optional<ExecStats> stats;
  std::optional<std::string> detail;

  friend bool operator==(const InstanceOutcome&, const InstanceOutcome&) = default;
};

/// (s, v) over the whole instance set.
struct AggregateResult {
  std::string submission_id;
  Status status = Status::ACC;
  Rational score = 0;
  std::vector<InstanceOutcome> per_instance;

  friend bool operator==(const AggregateResult&, const AggregateResult&) = default;
};

}  // namespace judge

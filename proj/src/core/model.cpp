#include "judge/core/model.hpp"

#include "judge/core/error.hpp"

namespace judge {

std::optional<Status> status_from_string(std::string_view name) noexcept {
  for (Status s : {Status::ACC, Status::TLE, Status::MLE, Status::WA, Status::RE, Status::OLE,
                   Status::QUEUED, Status::RUNNING, Status::CE}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

std::string_view to_string(ProblemKind k) noexcept {
  switch (k) {
    case ProblemKind::decision: return "decision";
    case ProblemKind::search: return "search";
    case ProblemKind::optimization: return "optimization";
  }
  return "?";
}

std::string_view to_string(Direction d) noexcept {
  switch (d) {
    case Direction::maximize: return "maximize";
    case Direction::minimize: return "minimize";
    case Direction::none: return "none";
  }
  return "?";
}

std::string_view to_string(PolicyKind p) noexcept {
  switch (p) {
    case PolicyKind::binary_icpc: return "binary_icpc";
    case PolicyKind::ioi_sum: return "ioi_sum";
    case PolicyKind::ioi_time_penalty: return "ioi_time_penalty";
    case PolicyKind::optimization_normalized: return "optimization_normalized";
  }
  return "?";
}

std::string_view to_string(CheckerKind c) noexcept {
  switch (c) {
    case CheckerKind::token_exact: return "token_exact";
    case CheckerKind::objective: return "objective";
    case CheckerKind::external: return "external";
  }
  return "?";
}

Alphabet Alphabet::digits() {
  Alphabet a;
  a.name = "digits";
  for (char c = '0'; c <= '9'; ++c) a.allowed.set(static_cast<unsigned char>(c));
  a.allowed.set(' ');
  a.allowed.set('\n');
  return a;
}

Alphabet Alphabet::csv_values() {
  Alphabet a = digits();
  a.name = "csv";
  a.csv = true;
  for (char c : std::string_view{",.-+eE\r"}) a.allowed.set(static_cast<unsigned char>(c));
  return a;
}

Alphabet Alphabet::text() {
  Alphabet a;
  a.name = "text";
  for (int c = 0x20; c < 0x7f; ++c) a.allowed.set(static_cast<std::size_t>(c));
  a.allowed.set('\n');
  a.allowed.set('\t');
  a.allowed.set('\r');
  return a;
}

Alphabet Alphabet::custom(std::string_view chars) {
  Alphabet a;
  a.name = "custom";
  for (char c : chars) a.allowed.set(static_cast<unsigned char>(c));
  return a;
}

Alphabet Alphabet::named(std::string_view name) {
  if (name == "digits") return digits();
  if (name == "csv") return csv_values();
  if (name == "text") return text();
  throw FormatError("unknown alphabet '" + std::string(name) + "'");
}

std::optional<std::size_t> Alphabet::first_violation(std::string_view data) const noexcept {
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!contains(static_cast<unsigned char>(data[i]))) return i;
  }
  return std::nullopt;
}

std::string Alphabet::chars() const {
  std::string out;
  for (std::size_t c = 0; c < allowed.size(); ++c) {
    if (allowed.test(c)) out.push_back(static_cast<char>(c));
  }
  return out;
}

PackageMalformed::PackageMalformed(std::vector<std::string> diagnostics)
    : JudgeError([&] {
        std::string msg = "malformed problem package";
        for (const auto& d : diagnostics) msg += "\n  " + d;
        return msg;
      }()),
      diagnostics_(std::move(diagnostics)) {}

}  // namespace judge

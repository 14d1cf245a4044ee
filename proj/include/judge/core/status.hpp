#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace judge {

/// Execution statuses. The first six are the per-instance verdicts; QUEUED,
/// RUNNING and CE only describe a submission as a whole.
enum class Status {
  ACC,
  TLE,
  MLE,
  WA,
  RE,
  OLE,
  QUEUED,
  RUNNING,
  CE,
};

inline constexpr std::array kInstanceStatuses{Status::ACC, Status::TLE, Status::MLE,
                                              Status::WA,  Status::RE,  Status::OLE};

constexpr bool is_instance_status(Status s) noexcept {
  switch (s) {
    case Status::ACC:
    case Status::TLE:
    case Status::MLE:
    case Status::WA:
    case Status::RE:
    case Status::OLE:
      return true;
    default:
      return false;
  }
}

constexpr std::string_view to_string(Status s) noexcept {
  switch (s) {
    case Status::ACC: return "ACC";
    case Status::TLE: return "TLE";
    case Status::MLE: return "MLE";
    case Status::WA: return "WA";
    case Status::RE: return "RE";
    case Status::OLE: return "OLE";
    case Status::QUEUED: return "QUEUED";
    case Status::RUNNING: return "RUNNING";
    case Status::CE: return "CE";
  }
  return "?";
}

std::optional<Status> status_from_string(std::string_view name) noexcept;

}  // namespace judge

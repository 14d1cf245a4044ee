#include "judge/service/journal.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

namespace judge::service {

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return {};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Parsed events plus the byte length of the intact prefix.
std::pair<std::vector<Event>, std::size_t> parse(const std::string& data, const fs::path& file) {
  std::vector<Event> events;
  std::size_t pos = 0, line_no = 0;
  while (pos < data.size()) {
    const auto nl = data.find('\n', pos);
    if (nl == std::string::npos) break;  // torn tail
    ++line_no;
    const std::string_view line(data.data() + pos, nl - pos);
    if (!line.empty()) {
      Event e;
      try {
        e = event_from_json(Json::parse(line));
      } catch (const MalformedLog& ex) {
        throw MalformedLog(file.string() + ":" + std::to_string(line_no) + ": " + ex.what());
      } catch (const std::exception& ex) {
        throw MalformedLog(file.string() + ":" + std::to_string(line_no) + ": " + ex.what());
      }
      if (!events.empty() && e.seq <= events.back().seq) {
        throw MalformedLog(file.string() + ":" + std::to_string(line_no) + ": sequence number " +
                           std::to_string(e.seq) + " does not increase");
      }
      events.push_back(std::move(e));
    }
    pos = nl + 1;
  }
  return {std::move(events), pos};
}

}  // namespace

std::vector<Event> read_journal(const fs::path& file) {
  std::error_code ec;
  if (!fs::exists(file, ec)) throw MalformedLog(file.string() + ": no such journal");
  return parse(slurp(file), file).first;
}

Journal::Journal(fs::path file) : path_(std::move(file)) {
  if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
  const std::string data = slurp(path_);
  auto [events, intact] = parse(data, path_);
  if (!events.empty()) last_seq_ = events.back().seq;
  fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw InfrastructureError("cannot open journal " + path_.string() + ": " + std::strerror(errno));
  if (intact < data.size() && ::ftruncate(fd_, static_cast<off_t>(intact)) != 0) {
    throw InfrastructureError("cannot truncate torn journal tail: " + std::string(std::strerror(errno)));
  }
}

Journal::~Journal() {
  if (fd_ >= 0) ::close(fd_);
}

Event Journal::append(Event e, std::int64_t at) {
  e.seq = last_seq_ + 1;
  e.at = at;
  const std::string line = event_to_json(e).dump() + "\n";
  std::size_t done = 0;
  while (done < line.size()) {
    const auto n = ::write(fd_, line.data() + done, line.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw InfrastructureError("journal write failed: " + std::string(std::strerror(errno)));
    }
    done += static_cast<std::size_t>(n);
  }
  if (::fdatasync(fd_) != 0) throw InfrastructureError("journal sync failed: " + std::string(std::strerror(errno)));
  last_seq_ = e.seq;
  return e;
}

void write_snapshot(const fs::path& file, const ContestState& state) {
  const fs::path tmp = file.string() + ".tmp";
  const std::string data = state.to_json().dump() + "\n";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw InfrastructureError("cannot write snapshot: " + std::string(std::strerror(errno)));
  bool ok = ::write(fd, data.data(), data.size()) == static_cast<ssize_t>(data.size());
  ok = ::fsync(fd) == 0 && ok;
  ::close(fd);
  if (!ok) throw InfrastructureError("cannot write snapshot " + tmp.string());
  fs::rename(tmp, file);
}

std::optional<ContestState> read_snapshot(const fs::path& file) {
  std::error_code ec;
  if (!fs::exists(file, ec)) return std::nullopt;
  try {
    return ContestState::from_json(Json::parse(slurp(file)));
  } catch (const MalformedLog&) {
    throw;
  } catch (const std::exception& e) {
    throw MalformedLog(file.string() + ": " + e.what());
  }
}

ContestState recover(const fs::path& journal, const fs::path& snapshot) {
  ContestState state = read_snapshot(snapshot).value_or(ContestState{});
  std::error_code ec;
  if (fs::exists(journal, ec)) {
    for (const auto& e : read_journal(journal)) state.apply(e);
  }
  return state;
}

ContestState replay_from_empty(const fs::path& journal) {
  ContestState state;
  for (const auto& e : read_journal(journal)) state.apply(e);
  return state;
}

}  // namespace judge::service

#pragma once

#include "judge/service/state.hpp"

#include <filesystem>
#include <optional>
#include <vector>

namespace judge::service {

/// Events of a JSON-lines journal in order. A final line without its
/// newline is a write cut short by a crash and is dropped; any other
/// unreadable line, or a sequence number that does not increase, is
/// MalformedLog.
std::vector<Event> read_journal(const std::filesystem::path& file);

/// Append-only event log. Each append is one write of one line followed
/// by fdatasync, so a crash loses at most the line being written.
class Journal {
 public:
  /// Opens (creating if needed) `file`, cutting off a torn final line.
  explicit Journal(std::filesystem::path file);
  ~Journal();
  Journal(const Journal&) = delete;
  Journal& operator=(const Journal&) = delete;

  /// Stamps `e` with the next sequence number and `at`, then persists it.
  Event append(Event e, std::int64_t at);

  std::uint64_t last_seq() const noexcept { return last_seq_; }
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  int fd_ = -1;
  std::uint64_t last_seq_ = 0;
};

/// Atomically replaces `file` with the state's encoding.
void write_snapshot(const std::filesystem::path& file, const ContestState& state);
std::optional<ContestState> read_snapshot(const std::filesystem::path& file);

/// State from the snapshot (if any) plus the journal events after it.
ContestState recover(const std::filesystem::path& journal, const std::filesystem::path& snapshot);

/// State from replaying every journal event from empty.
ContestState replay_from_empty(const std::filesystem::path& journal);

}  // namespace judge::service

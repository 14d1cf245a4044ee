#pragma once

#include <filesystem>
#include <memory>
#include <string>

namespace judge {

/// A directory removed (recursively) when the last owner lets go of it.
class ScratchDir {
 public:
  /// Creates a fresh uniquely named directory below `parent`.
  static std::shared_ptr<ScratchDir> create(const std::filesystem::path& parent,
                                            const std::string& prefix);
  ~ScratchDir();

  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  explicit ScratchDir(std::filesystem::path p) : path_(std::move(p)) {}
  std::filesystem::path path_;
};

}  // namespace judge

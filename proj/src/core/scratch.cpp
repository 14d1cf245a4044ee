#include "judge/core/scratch.hpp"

#include "judge/core/error.hpp"

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <system_error>

namespace judge {

std::shared_ptr<ScratchDir> ScratchDir::create(const std::filesystem::path& parent,
                                               const std::string& prefix) {
  std::filesystem::create_directories(parent);
  std::string tmpl = (parent / (prefix + "XXXXXX")).string();
  if (::mkdtemp(tmpl.data()) == nullptr) {
    throw InfrastructureError("mkdtemp in " + parent.string() + ": " + std::strerror(errno));
  }
  return std::shared_ptr<ScratchDir>(new ScratchDir(tmpl));
}

ScratchDir::~ScratchDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace judge

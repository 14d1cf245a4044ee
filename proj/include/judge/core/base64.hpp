#pragma once

#include <string>
#include <string_view>

namespace judge {

/// Standard (RFC 4648) alphabet with padding.
std::string base64_encode(std::string_view bytes);
/// Throws FormatError on invalid input.
std::string base64_decode(std::string_view text);

}  // namespace judge

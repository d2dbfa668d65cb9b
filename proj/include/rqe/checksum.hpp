#pragma once

#include <string>
#include <string_view>

namespace rqe {

/// Hex-encoded SHA-256 digest of `data`.
std::string sha256_hex(std::string_view data);

/// Hex-encoded SHA-256 digest of a file's bytes. Throws rqe::Error if unreadable.
std::string sha256_file(const std::string& path);

}  // namespace rqe

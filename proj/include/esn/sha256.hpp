#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace esn {

/// SHA-256 digest as a lowercase hex string.
std::string sha256_hex(std::span<const unsigned char> bytes);
std::string sha256_hex(const std::string& bytes);

/// Digest of a file's contents; throws when the file cannot be read.
std::string sha256_file(const std::string& path);

}  // namespace esn

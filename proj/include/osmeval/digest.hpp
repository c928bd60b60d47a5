#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace osmeval {

/// SHA-256 of a byte string, as lowercase hex.
std::string sha256_hex(std::string_view data);

/// SHA-256 of a file's contents. Throws IoError if unreadable.
std::string sha256_file_hex(const std::filesystem::path& path);

}  // namespace osmeval

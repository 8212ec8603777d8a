#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace panelist {

/// Lower-case hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it into place, so readers
/// never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view data);

}  // namespace panelist

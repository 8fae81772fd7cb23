#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace devcarbon {

/// Throws DataError when the file cannot be read.
std::string read_text_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe a partially written output. Creates parent directories.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace devcarbon

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mlmath {

/// Writes `content` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// Splits on `sep`, keeping empty fields.
std::vector<std::string> split(std::string_view text, char sep);

std::string_view trim(std::string_view text);

/// Strict integer/real parsing of a whole field; throws DataError with
/// `context` in the message on failure.
long long parse_int(std::string_view field, const std::string& context);
double parse_real(std::string_view field, const std::string& context);

}  // namespace mlmath

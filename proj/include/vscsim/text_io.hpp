#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace vscsim {

/// Shortest decimal text that parses back to the identical double.
std::string format_double(double v);

/// Strict decimal parse of the whole field; nullopt-like failure via bool.
bool parse_double(std::string_view text, double& out);
bool parse_int(std::string_view text, long long& out);

std::vector<std::string_view> split(std::string_view line, char sep);
std::string_view trim(std::string_view s);

std::string read_text_file(const std::filesystem::path& path);

/// Writes to `<path>.tmp` and renames over the target.
void write_text_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace vscsim

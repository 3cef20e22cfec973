#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace spme::io {

/// Shortest representation that parses back to the same double.
std::string format_double(double value);

/// Exact inverse of format_double. Throws ConfigError on malformed input.
double parse_double(std::string_view text);
long long parse_integer(std::string_view text);

std::string read_text(const std::filesystem::path& path);

/// Writes to a sibling temporary and renames over the target.
void write_text_atomic(const std::filesystem::path& path, std::string_view content);

/// Sectioned key = value document. Keys outside any section land in "".
/// Comment lines start with '#' or ';'.
using IniDocument = std::map<std::string, std::map<std::string, std::string>>;

IniDocument parse_ini(std::string_view text);
std::string format_ini(const IniDocument& doc);

std::vector<double> parse_double_list(std::string_view text);
std::string format_double_list(const std::vector<double>& values);

}  // namespace spme::io

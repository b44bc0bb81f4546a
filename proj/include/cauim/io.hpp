#pragma once

#include <filesystem>
#include <iosfwd>
#include <fstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cauim::io {

// Shortest form that survives a text round trip ("%.17g").
std::string format_double(double value);

// Fixed three-decimal formatting used for wall-clock seconds.
std::string format_seconds(double seconds);

std::vector<std::string_view> split(std::string_view text, char sep);

std::string_view trim(std::string_view text);

double parse_double(std::string_view text, std::size_t line);
long long parse_int(std::string_view text, std::size_t line);
std::uint64_t parse_uint(std::string_view text, std::size_t line);

// `key = value` lines; '#' starts a comment line. Order is preserved so later
// keys can override earlier ones.
std::vector<std::pair<std::string, std::string>> parse_key_values(std::istream& in);

std::ifstream open_input(const std::filesystem::path& path);
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace cauim::io

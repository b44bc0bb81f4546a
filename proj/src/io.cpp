#include "cauim/io.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <istream>

#include "cauim/error.hpp"

namespace cauim {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::EmptyHyperedge: return "EmptyHyperedge";
    case ErrorCode::DuplicateMember: return "DuplicateMember";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DegenerateArm: return "DegenerateArm";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace cauim

namespace cauim::io {

std::string format_double(double value) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(n));
}

std::string format_seconds(double seconds) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.3f", seconds);
  return std::string(buf, static_cast<std::size_t>(n));
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

double parse_double(std::string_view text, std::size_t line) {
  const std::string s(trim(text));
  if (s.empty()) throw ParseError(line, "empty numeric field");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) throw ParseError(line, "not a number: '" + s + "'");
  return v;
}

long long parse_int(std::string_view text, std::size_t line) {
  const std::string_view s = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError(line, "not an integer: '" + std::string(s) + "'");
  }
  return v;
}

std::uint64_t parse_uint(std::string_view text, std::size_t line) {
  const std::string_view s = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError(line, "not a nonnegative integer: '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::pair<std::string, std::string>> parse_key_values(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
    const std::string_view key = trim(text.substr(0, eq));
    if (key.empty()) throw ParseError(line_no, "empty key");
    out.emplace_back(std::string(key), std::string(trim(text.substr(eq + 1))));
  }
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace cauim::io

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace linlaw {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

/// Parses a full token as a double. Returns nullopt on syntax errors,
/// partial consumption, or non-finite results.
std::optional<double> parse_finite_double(std::string_view token);

std::optional<std::uint64_t> parse_uint64(std::string_view token);

std::string_view trim(std::string_view s);

std::vector<std::string> split(std::string_view s, char delim);

/// Reads a whole text file into lines. CRLF and LF both accepted; a single
/// trailing newline does not produce an extra empty line.
std::vector<std::string> read_lines(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& content);

} // namespace linlaw

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mixforge::util {

// --- number parsing (strict: whole field must be consumed) ---

std::optional<std::uint64_t> parse_u64(std::string_view s);
std::optional<double> parse_double(std::string_view s);

// --- formatting ---

// Round to `decimals` places, ties to even, and format with trailing zeros
// kept ("34.89", "-6.20").
std::string format_fixed(double value, int decimals);
double round_half_even(double value, int decimals);

// Thousands-separated integer for human-readable summaries.
std::string group_digits(std::uint64_t value);

// --- strings ---

std::vector<std::string> split(std::string_view line, char sep);
std::string join(const std::vector<std::string>& parts, char sep);
std::string strip(std::string_view s);

// --- UTF-8 ---

bool utf8_valid(std::string_view s);
// Decodes to codepoints; input must be valid UTF-8.
std::vector<char32_t> utf8_decode(std::string_view s);
std::string utf8_encode(std::u32string_view cps);

// --- filesystem ---

// Writes to a temp file in the target directory, then renames into place.
// Either the full content lands or nothing does.
void atomic_write_file(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);
std::vector<std::string> read_lines(const std::filesystem::path& path);

} // namespace mixforge::util

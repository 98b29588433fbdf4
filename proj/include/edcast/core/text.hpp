#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace edcast {

/// Shortest decimal representation that round-trips to the same double.
std::string format_roundtrip(double v);
/// Fixed-point with exactly `digits` fractional digits ("C" locale).
std::string format_fixed(double v, int digits);

bool parse_double(std::string_view s, double& out);

std::vector<std::string_view> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);

/// Splits one CSV record, honouring double-quoted fields with "" escapes.
std::vector<std::string> split_csv_record(std::string_view line);
std::string csv_quote(std::string_view field);

/// Splits text into lines (CR stripped).
std::vector<std::string> split_lines(std::string_view text);
/// Reads a text file into lines (CR stripped). Throws Error when unreadable.
std::vector<std::string> read_lines(const std::filesystem::path& path);
std::string read_file(const std::filesystem::path& path);

/// Writes via a temporary sibling file and rename, so readers never observe a
/// partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

} // namespace edcast

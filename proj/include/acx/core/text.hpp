#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace acx::text {

// Shortest decimal form that parses back to the identical double.
std::string exact(double v);
// Fixed-point with the given number of decimals; "-0.0000" is printed as "0.0000".
std::string fixed(double v, int decimals);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

std::string read_file(const std::filesystem::path& path);

/// Writes to "<path>.tmp" and renames over path, so readers never observe a
/// partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

} // namespace acx::text

// Small helpers for the delimited-text formats.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ringcast::text {

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view line, char sep = ',');
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

// Fixed-point rendering with `digits` decimals; "-0.000" is normalized to "0.000".
std::string fixed(double v, int digits);

// Comment or blank line in the `#`-comment formats.
bool is_skippable(std::string_view line);

// Whole file as a string. Throws InputError("UnreadableFile") naming the path.
std::string read_file(const std::string& path);
// Throws InputError("IoFailure") naming the path.
void write_file(const std::string& path, std::string_view contents);

} // namespace ringcast::text

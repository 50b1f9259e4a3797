#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace funcmod {

// Shortest text form that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view s); // throws InvalidData on junk

// Minimal RFC-style CSV. The writer quotes only when needed, so
// parse -> write round-trips byte-identically on writer output.
std::string csv_escape(std::string_view field);
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

std::string read_file(const std::string& path);
void write_file_atomic(const std::string& path, std::string_view content);

} // namespace funcmod

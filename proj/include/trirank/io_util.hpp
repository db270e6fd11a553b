#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace trirank {

// Shortest representation that round-trips exactly.
std::string fmt_double(double v);

// Reads a whole file; paths ending in .gz are inflated.
std::string read_text_file(const std::string& path);

void write_text_file(const std::string& path, std::string_view content);

// RFC-4180 style cell quoting: quotes only when the cell needs it.
std::string csv_escape(std::string_view cell);

// Full CSV parse including quoted cells with embedded separators and
// newlines. Accepts \n and \r\n row endings.
std::vector<std::vector<std::string>> parse_csv(std::string_view content);

std::vector<std::string_view> split_lines(std::string_view content);

}  // namespace trirank

#pragma once

#include <string>
#include <vector>

namespace luis::csv {

inline constexpr const char* kSchemaVersion = "1";

// Shortest round-trip decimal form; identical bytes for identical doubles.
std::string format_double(double value);

struct Table {
  std::vector<std::string> comments;  // leading '#' lines, markers stripped
  std::vector<std::vector<std::string>> rows;

  // Index of `name` in the header row (rows[0]).
  size_t column(const std::string& name) const;
};

Table read_table(const std::string& path);

// Lines are written verbatim; callers compose rows via format_double.
void write_lines(const std::string& path, const std::vector<std::string>& lines);

std::vector<std::string> split(const std::string& line, char sep);

}  // namespace luis::csv

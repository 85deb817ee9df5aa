#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace impatient {

// Decimal text with `digits` significant digits (17 round-trips a double).
std::string format_real(double v, int digits = 17);

double parse_real(const std::string& text);

// Writes `content` to a sibling temp file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

// Comma-separated table with a single header line.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
};

std::string to_csv(const Table& table);
Table parse_csv(const std::string& text);
Table read_csv(const std::filesystem::path& path);

}  // namespace impatient

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace radiomics {

/// Minimal comma-separated reader: no quoting, cells are whitespace-trimmed,
/// blank lines and lines starting with '#' are skipped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::filesystem::path& path);
std::vector<std::string> split_csv_line(const std::string& line);
double parse_double(const std::string& text);
std::string to_lower(std::string s);

}  // namespace radiomics

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace amcci::io {

/// Shortest-stable text form used in every CSV the library writes.
std::string fmt(double v);

std::string read_file(const std::filesystem::path& path);
/// Writes to a temporary sibling and renames over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Values of a single numeric column. A non-numeric first line is treated
/// as a header. Throws std::runtime_error on malformed rows.
std::vector<double> parse_single_column(const std::string& text);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvTable parse_csv(const std::string& text);

}  // namespace amcci::io

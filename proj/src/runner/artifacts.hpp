#pragma once

// Output helpers shared by the experiments: deterministic number formatting,
// RFC 4180 CSV and atomic file replacement.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace vlg::artifacts {

// Shortest-round-trip-safe "%.17g"; identical bytes for identical doubles.
std::string number(double v);
std::string quote(std::string_view field);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add(std::vector<std::string> row);
  std::size_t rows() const noexcept { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Writes `content` to a sibling temp file, then renames it over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);

std::string utc_timestamp();

}  // namespace vlg::artifacts

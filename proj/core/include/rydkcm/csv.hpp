#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace rydkcm {

/// RFC-4180 writer: comma separated, CRLF-free ("\n") records, fields quoted
/// only when they contain a comma, quote, CR or LF. Numbers use the shortest
/// round-trip representation.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  CsvWriter& field(std::string_view text);
  CsvWriter& field(double value);
  CsvWriter& field(long long value);
  CsvWriter& field(int value) { return field(static_cast<long long>(value)); }
  CsvWriter& field(std::size_t value) { return field(static_cast<long long>(value)); }
  /// Ends the current record; throws ArgumentError on a column-count mismatch.
  void end_row();

  const std::filesystem::path& path() const { return path_; }
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_ = 0;
  std::size_t current_ = 0;
};

std::string csv_escape(std::string_view field);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws ArgumentError when missing.
  std::size_t column(std::string_view name) const;
  /// Column parsed as doubles.
  std::vector<double> numbers(std::string_view name) const;
};

/// RFC-4180 reader (quoted fields, embedded quotes and newlines).
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace rydkcm

#include "rydkcm/csv.hpp"

#include <charconv>
#include <sstream>

#include "rydkcm/config.hpp"
#include "rydkcm/errors.hpp"

namespace rydkcm {

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), columns_(header.size()) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw Error("cannot open " + path.string() + " for writing");
  for (const auto& h : header) field(h);
  end_row();
}

CsvWriter& CsvWriter::field(std::string_view text) {
  if (current_ > 0) out_ << ',';
  out_ << csv_escape(text);
  ++current_;
  return *this;
}

CsvWriter& CsvWriter::field(double value) { return field(std::string_view(format_double(value))); }

CsvWriter& CsvWriter::field(long long value) { return field(std::string_view(std::to_string(value))); }

void CsvWriter::end_row() {
  if (current_ != columns_) {
    throw ArgumentError("CSV row in " + path_.string() + " has " + std::to_string(current_) + " fields, expected " +
                        std::to_string(columns_));
  }
  out_ << '\n';
  current_ = 0;
}

void CsvWriter::close() {
  out_.flush();
  out_.close();
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ArgumentError("CSV has no column '" + std::string(name) + "'");
}

std::vector<double> CsvTable::numbers(std::string_view name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    const std::string& s = row.at(c);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw ArgumentError("not a number in CSV: '" + s + "'");
    out.push_back(v);
  }
  return out;
}

CsvTable parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false, field_started = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"' && field.empty()) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      field_started = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      record.push_back(std::move(field));
      field.clear();
      records.push_back(std::move(record));
      record.clear();
      field_started = false;
    } else {
      field += c;
      field_started = true;
    }
  }
  if (quoted) throw ArgumentError("unterminated quoted CSV field");
  if (field_started || !field.empty() || !record.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  CsvTable t;
  if (records.empty()) return t;
  t.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != t.header.size()) {
      throw ArgumentError("CSV record " + std::to_string(r) + " has " + std::to_string(records[r].size()) +
                          " fields, header has " + std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(records[r]));
  }
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

}  // namespace rydkcm

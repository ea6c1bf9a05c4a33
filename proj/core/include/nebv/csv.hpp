#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace nebv {

/// 10 significant digits, "inf"/"-inf"/"nan" for non-finite values.
std::string format_number(double value);

/// RFC 4180 field quoting: quotes fields containing separators, quotes or newlines.
std::string csv_escape(std::string_view field);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  CsvWriter& field(std::string_view text);
  CsvWriter& field(double value);
  CsvWriter& field(long long value);
  CsvWriter& field(std::size_t value) { return field(static_cast<long long>(value)); }
  CsvWriter& field(int value) { return field(static_cast<long long>(value)); }
  void end_row();
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
  bool first_ = true;
};

struct DelimitedRow {
  std::size_t line = 0;  // 1-based line number in the source
  std::vector<std::string> cells;
};

/// Reads a comma- or tab-separated file (separator detected from the first
/// non-empty line). Handles double-quoted fields; skips blank lines.
std::vector<DelimitedRow> read_delimited(const std::string& path);
std::vector<DelimitedRow> parse_delimited(std::string_view text, const std::string& source);

/// Strict double parse of a whole cell; returns false on any trailing junk.
bool parse_double_cell(std::string_view cell, double& out);

}  // namespace nebv

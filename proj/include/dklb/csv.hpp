#pragma once

// Minimal CSV tables: a header row and rows of cells. Numbers are written in
// the shortest form that round-trips, so output is byte-stable.

#include <string>
#include <vector>

namespace dklb {

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  void add_row(std::vector<std::string> cells);
  /// Index of a header column; throws ValidationError if absent.
  std::size_t column(const std::string& name) const;
  /// Numeric value of a cell; throws ValidationError if it does not parse.
  double number(std::size_t row, std::size_t col) const;

  std::string str() const;
  void write(const std::string& path) const;
  static CsvTable read(const std::string& path);

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Shortest round-trip decimal form; "inf", "-inf" and "nan" for non-finite values.
std::string format_number(double v);

}  // namespace dklb

#include "dklb/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dklb/error.hpp"

namespace dklb {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw ValidationError("csv: header must not be empty");
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) {
    throw ValidationError("csv: row has " + std::to_string(cells.size()) + " cells, header has " +
                          std::to_string(header_.size()));
  }
  rows_.push_back(std::move(cells));
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  throw ValidationError("csv: missing column '" + name + "'");
}

double CsvTable::number(std::size_t row, std::size_t col) const {
  const std::string& s = rows_.at(row).at(col);
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  if (s == "nan") return NAN;
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ValidationError("csv: cell '" + s + "' in column '" + header_.at(col) + "' is not a number");
  }
  return v;
}

std::string CsvTable::str() const {
  std::ostringstream os;
  auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return os.str();
}

void CsvTable::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("csv: cannot open '" + path + "' for writing");
  out << str();
  if (!out) throw ValidationError("csv: write to '" + path + "' failed");
}

CsvTable CsvTable::read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("csv: cannot open '" + path + "'");
  auto cells = [](const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
  };
  std::string line;
  if (!std::getline(in, line) || line.empty()) throw ValidationError("csv: '" + path + "' has no header");
  if (line.back() == '\r') line.pop_back();
  CsvTable t(cells(line));
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    t.add_row(cells(line));
  }
  return t;
}

}  // namespace dklb

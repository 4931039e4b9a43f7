#pragma once

// Comma-separated text with a mandatory header row, '.' decimals, UTF-8.

#include <Eigen/Dense>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <variant>
#include <vector>

#include "sparsekern/error.hpp"

namespace sparsekern {

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && (*first == ' ' || *first == '\t')) ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\t' || last[-1] == '\r')) --last;
  if (first < last && *first == '+') ++first;
  double v = 0.0;
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last)
    throw validation_error("not a number: '" + s + "'");
  return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

/// In-memory table used for study outputs: one header, rows of typed cells.
class Table {
 public:
  using Cell = std::variant<std::int64_t, double, std::string>;

  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_row(std::vector<Cell> row) {
    require(row.size() == columns_.size(), "table row width does not match header");
    rows_.push_back(std::move(row));
  }

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }

  std::string to_csv() const {
    std::ostringstream os;
    write(os);
    return os.str();
  }

  void write(std::ostream& os) const {
    for (std::size_t c = 0; c < columns_.size(); ++c) os << (c ? "," : "") << columns_[c];
    os << '\n';
    for (const auto& row : rows_) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) os << ',';
        std::visit(
            [&](const auto& v) {
              using T = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<T, double>)
                os << format_double(v);
              else
                os << v;
            },
            row[c]);
      }
      os << '\n';
    }
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

/// Numeric CSV: header names plus an n x c matrix. A file with no bytes at all
/// yields zero columns and zero rows.
struct NumericCsv {
  std::vector<std::string> header;
  Eigen::MatrixXd values;
};

inline NumericCsv read_numeric_csv(std::istream& in) {
  NumericCsv out;
  std::string line;
  if (!std::getline(in, line)) return out;
  out.header = split_csv_line(line);
  const std::size_t c = out.header.size();
  std::vector<double> flat;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != c)
      throw validation_error("CSV row " + std::to_string(rows + 2) + " has " +
                             std::to_string(cells.size()) + " fields, header has " +
                             std::to_string(c));
    for (const auto& s : cells) {
      const double v = parse_double(s);
      if (!std::isfinite(v))
        throw validation_error("CSV row " + std::to_string(rows + 2) + ": non-finite value");
      flat.push_back(v);
    }
    ++rows;
  }
  out.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(c));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t k = 0; k < c; ++k)
      out.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = flat[r * c + k];
  return out;
}

inline NumericCsv read_numeric_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open '" + path + "'");
  return read_numeric_csv(in);
}

}  // namespace sparsekern

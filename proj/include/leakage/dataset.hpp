#pragma once

// Column-typed tabular data read from CSV. A column is numeric when every
// cell parses as a finite real; otherwise it is categorical with levels
// kept in lexicographic order.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "leakage/error.hpp"

namespace leakage {

struct NumericColumn {
  std::vector<double> values;
};

struct CategoricalColumn {
  std::vector<std::string> levels;  // sorted, unique
  std::vector<std::size_t> codes;   // index into levels, one per row

  const std::string& at(std::size_t row) const { return levels[codes[row]]; }
};

struct Column {
  std::string name;
  std::variant<NumericColumn, CategoricalColumn> data;

  bool is_numeric() const { return std::holds_alternative<NumericColumn>(data); }
  const NumericColumn& numeric() const { return std::get<NumericColumn>(data); }
  const CategoricalColumn& categorical() const { return std::get<CategoricalColumn>(data); }
  std::size_t size() const {
    return is_numeric() ? numeric().values.size() : categorical().codes.size();
  }
};

inline CategoricalColumn make_categorical(const std::vector<std::string>& cells) {
  CategoricalColumn c;
  c.levels = cells;
  std::sort(c.levels.begin(), c.levels.end());
  c.levels.erase(std::unique(c.levels.begin(), c.levels.end()), c.levels.end());
  c.codes.reserve(cells.size());
  for (const auto& cell : cells)
    c.codes.push_back(static_cast<std::size_t>(std::lower_bound(c.levels.begin(), c.levels.end(), cell) -
                                               c.levels.begin()));
  return c;
}

class Dataset {
 public:
  Dataset() = default;

  explicit Dataset(std::vector<Column> columns) : columns_(std::move(columns)) {
    if (columns_.empty()) return;
    rows_ = columns_.front().size();
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      if (columns_[i].size() != rows_)
        throw DataError("column '" + columns_[i].name + "' has " + std::to_string(columns_[i].size()) +
                        " rows, expected " + std::to_string(rows_));
      for (std::size_t j = 0; j < i; ++j)
        if (columns_[j].name == columns_[i].name) throw DataError("duplicate column name '" + columns_[i].name + "'");
    }
  }

  std::size_t rows() const { return rows_; }
  const std::vector<Column>& columns() const { return columns_; }

  bool has(std::string_view name) const {
    return std::any_of(columns_.begin(), columns_.end(), [&](const Column& c) { return c.name == name; });
  }

  const Column& column(std::string_view name) const {
    for (const auto& c : columns_)
      if (c.name == name) return c;
    throw DataError("no column named '" + std::string(name) + "'");
  }

 private:
  std::vector<Column> columns_;
  std::size_t rows_ = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Splits one CSV record; supports double-quoted fields with "" escapes.
inline std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false, was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
      was_quoted = true;
    } else if (ch == ',') {
      out.push_back(was_quoted ? field : std::string(trim(field)));
      field.clear();
      was_quoted = false;
    } else {
      field.push_back(ch);
    }
  }
  if (quoted) throw DataError("line " + std::to_string(line_no) + ": unterminated quoted field");
  out.push_back(was_quoted ? field : std::string(trim(field)));
  return out;
}

inline bool is_missing(std::string_view cell) {
  return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan" || cell == "null";
}

inline bool parse_real(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace detail

/// Reads a CSV document with a header row. Row order is preserved.
inline Dataset load_dataset(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!detail::trim(line).empty()) {
      header = detail::split_csv_line(line, line_no);
      break;
    }
  }
  if (header.empty()) throw DataError("missing header row");
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j].empty()) throw DataError("header: column " + std::to_string(j + 1) + " has no name");

  std::vector<std::vector<std::string>> cells(header.size());
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split_csv_line(line, line_no);
    ++row;
    if (fields.size() != header.size())
      throw DataError("row " + std::to_string(row) + " (line " + std::to_string(line_no) + "): expected " +
                      std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()));
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (detail::is_missing(fields[j]))
        throw DataError("row " + std::to_string(row) + " (line " + std::to_string(line_no) +
                        "): missing value in column '" + header[j] + "'");
      cells[j].push_back(std::move(fields[j]));
    }
  }

  std::vector<Column> columns;
  for (std::size_t j = 0; j < header.size(); ++j) {
    std::vector<double> values(cells[j].size());
    bool numeric = true;
    for (std::size_t i = 0; i < cells[j].size() && numeric; ++i) numeric = detail::parse_real(cells[j][i], values[i]);
    if (numeric)
      columns.push_back({header[j], NumericColumn{std::move(values)}});
    else
      columns.push_back({header[j], make_categorical(cells[j])});
  }
  return Dataset(std::move(columns));
}

inline Dataset parse_csv(std::string_view csv_text) {
  std::istringstream in{std::string(csv_text)};
  return load_dataset(in);
}

inline Dataset load_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return load_dataset(in);
}

/// Shortest decimal text that parses back to the same double.
inline std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

/// Writes the dataset in the schema load_dataset reads; numeric values round-trip exactly.
inline void write_csv(std::ostream& out, const Dataset& data) {
  const auto& cols = data.columns();
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q.push_back('"');
      q.push_back(c);
    }
    return q + "\"";
  };
  for (std::size_t j = 0; j < cols.size(); ++j) out << (j ? "," : "") << quote(cols[j].name);
  out << '\n';
  for (std::size_t i = 0; i < data.rows(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (j) out << ',';
      if (cols[j].is_numeric())
        out << format_real(cols[j].numeric().values[i]);
      else
        out << quote(cols[j].categorical().at(i));
    }
    out << '\n';
  }
}

}  // namespace leakage

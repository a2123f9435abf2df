#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace mlqc {

enum class DataErrorCode {
  empty_file,
  ragged_row,
  empty_cell,
  non_finite_cell,
  type_conflict,
  duplicate_column,
  missing_column,
  bad_schema,
  io_failure,
  bad_format,
};

inline const char* to_string(DataErrorCode c) {
  switch (c) {
    case DataErrorCode::empty_file: return "empty-file";
    case DataErrorCode::ragged_row: return "ragged-row";
    case DataErrorCode::empty_cell: return "empty-cell";
    case DataErrorCode::non_finite_cell: return "non-finite-cell";
    case DataErrorCode::type_conflict: return "type-conflict";
    case DataErrorCode::duplicate_column: return "duplicate-column";
    case DataErrorCode::missing_column: return "missing-column";
    case DataErrorCode::bad_schema: return "bad-schema";
    case DataErrorCode::io_failure: return "io-failure";
    case DataErrorCode::bad_format: return "bad-format";
  }
  return "?";
}

class DataError : public std::runtime_error {
 public:
  DataError(DataErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}
  DataErrorCode code() const { return code_; }

 private:
  DataErrorCode code_;
};

enum class ColumnKind { numeric, categorical };

// Rectangular table of named columns, each numeric (finite reals) or
// categorical (strings). No missing data: an empty cell is a load error, and
// any cell spelling a non-finite float (nan/inf) is rejected outright.
class Dataset {
 public:
  struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::categorical;
    std::vector<double> numeric;
    std::vector<std::string> text;
  };

  Dataset(std::vector<Column> columns, std::size_t rows)
      : columns_(std::move(columns)), rows_(rows) {
    if (rows_ == 0) throw DataError(DataErrorCode::empty_file, "no data rows");
  }

  std::size_t rows() const { return rows_; }
  std::size_t column_count() const { return columns_.size(); }
  const std::vector<Column>& columns() const { return columns_; }

  bool has_column(const std::string& name) const {
    return find(name) != nullptr;
  }

  const Column& column(const std::string& name) const {
    const Column* c = find(name);
    if (!c) throw DataError(DataErrorCode::missing_column, name);
    return *c;
  }

  const std::vector<double>& numeric_column(const std::string& name) const {
    const Column& c = column(name);
    if (c.kind != ColumnKind::numeric)
      throw DataError(DataErrorCode::type_conflict,
                      "column '" + name + "' is not numeric");
    return c.numeric;
  }

  const std::vector<std::string>& text_column(const std::string& name) const {
    const Column& c = column(name);
    if (c.kind != ColumnKind::categorical)
      throw DataError(DataErrorCode::type_conflict,
                      "column '" + name + "' is not categorical");
    return c.text;
  }

 private:
  const Column* find(const std::string& name) const {
    for (const auto& c : columns_)
      if (c.name == name) return &c;
    return nullptr;
  }

  std::vector<Column> columns_;
  std::size_t rows_ = 0;
};

namespace detail {

// Split one CSV record. Quoted fields may contain commas and doubled quotes;
// multi-line fields are not supported.
inline std::vector<std::string> split_csv_line(const std::string& line,
                                               std::size_t line_number) {
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"' && field.empty()) {
      in_quotes = true;
    } else if (ch == ',') {
      fields.push_back(field);
      field.clear();
    } else {
      field.push_back(ch);
    }
  }
  if (in_quotes)
    throw DataError(DataErrorCode::bad_format,
                    "unterminated quote on line " + std::to_string(line_number));
  fields.push_back(field);
  return fields;
}

// Parse a cell as a real number. Surrounding blanks and a leading '+' are
// tolerated (from_chars accepts neither). nullopt means "not a number";
// non-finite results are reported separately so they can be rejected.
inline std::optional<double> parse_real(const std::string& cell) {
  std::size_t lo = 0;
  std::size_t hi = cell.size();
  while (lo < hi && (cell[lo] == ' ' || cell[lo] == '\t')) ++lo;
  while (hi > lo && (cell[hi - 1] == ' ' || cell[hi - 1] == '\t')) --hi;
  if (lo < hi && cell[lo] == '+') ++lo;
  if (lo == hi) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(cell.data() + lo, cell.data() + hi, value);
  if (ec != std::errc() || ptr != cell.data() + hi) return std::nullopt;
  return value;
}

inline std::optional<double> parse_finite(const std::string& cell) {
  const auto v = parse_real(cell);
  if (!v || !std::isfinite(*v)) return std::nullopt;
  return v;
}

// Tokens that parse as a real but violate the finite-only contract.
inline bool spells_non_finite(const std::string& cell) {
  const auto v = parse_real(cell);
  return v.has_value() && !std::isfinite(*v);
}

}  // namespace detail

using Schema = std::map<std::string, ColumnKind>;

// Load a comma-separated file with a header row. A column is numeric iff
// every cell parses as a finite real; the schema overrides inference per
// column. Error codes distinguish ragged rows, empty cells, non-finite
// tokens, and schema/type conflicts.
inline Dataset load_dataset(const std::string& path,
                            const Schema& schema = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(DataErrorCode::io_failure, "cannot open " + path);

  std::vector<std::string> names;
  std::vector<std::vector<std::string>> cells;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && line_number > 1) continue;  // trailing blank lines
    auto fields = detail::split_csv_line(line, line_number);
    if (line_number == 1) {
      names = std::move(fields);
      for (std::size_t i = 0; i < names.size(); ++i)
        for (std::size_t j = i + 1; j < names.size(); ++j)
          if (names[i] == names[j])
            throw DataError(DataErrorCode::duplicate_column, names[i]);
      cells.resize(names.size());
      continue;
    }
    if (fields.size() != names.size())
      throw DataError(DataErrorCode::ragged_row,
                      "line " + std::to_string(line_number) + " has " +
                          std::to_string(fields.size()) + " fields, expected " +
                          std::to_string(names.size()));
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (fields[c].empty())
        throw DataError(DataErrorCode::empty_cell,
                        "line " + std::to_string(line_number) + ", column '" +
                            names[c] + "'");
      if (detail::spells_non_finite(fields[c]))
        throw DataError(DataErrorCode::non_finite_cell,
                        "line " + std::to_string(line_number) + ", column '" +
                            names[c] + "': " + fields[c]);
      cells[c].push_back(std::move(fields[c]));
    }
  }
  if (names.empty() || cells.empty() || cells[0].empty())
    throw DataError(DataErrorCode::empty_file, path);

  for (const auto& [name, kind] : schema) {
    (void)kind;
    bool known = false;
    for (const auto& n : names) known = known || n == name;
    if (!known)
      throw DataError(DataErrorCode::bad_schema,
                      "schema names unknown column '" + name + "'");
  }

  std::vector<Dataset::Column> columns(names.size());
  const std::size_t rows = cells[0].size();
  for (std::size_t c = 0; c < names.size(); ++c) {
    auto& col = columns[c];
    col.name = names[c];
    std::vector<double> numeric;
    numeric.reserve(rows);
    bool all_numeric = true;
    for (const auto& cell : cells[c]) {
      const auto v = detail::parse_finite(cell);
      if (!v) {
        all_numeric = false;
        break;
      }
      numeric.push_back(*v);
    }
    const auto forced = schema.find(col.name);
    if (forced != schema.end() && forced->second == ColumnKind::numeric &&
        !all_numeric)
      throw DataError(DataErrorCode::type_conflict,
                      "schema forces numeric on column '" + col.name +
                          "' with non-numeric cells");
    const bool numeric_kind =
        forced != schema.end() ? forced->second == ColumnKind::numeric
                               : all_numeric;
    if (numeric_kind) {
      col.kind = ColumnKind::numeric;
      col.numeric = std::move(numeric);
    } else {
      col.kind = ColumnKind::categorical;
      col.text = std::move(cells[c]);
    }
  }
  return Dataset(std::move(columns), rows);
}

}  // namespace mlqc

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "testbed/common/error.hpp"

namespace testbed::csv {

struct Row {
  std::size_t line = 0;  // 1-based line number where the record starts
  std::vector<std::string> fields;
};

class CsvError : public SyntaxError {
 public:
  CsvError(std::size_t line, const std::string& what)
      : SyntaxError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// RFC 4180 reader: quoted fields may contain commas, doubled quotes and
/// newlines. Accepts LF or CRLF. Blank lines are skipped.
std::vector<Row> parse(std::string_view document);

/// A parsed document whose first row is a header with named columns.
class Table {
 public:
  /// Throws CsvError unless the header equals `expected` exactly.
  Table(std::string_view document, const std::vector<std::string>& expected);

  const std::vector<Row>& rows() const noexcept { return rows_; }
  const std::vector<std::string>& header() const noexcept { return header_; }

  /// Field by column name; rows shorter than the header read as empty.
  const std::string& field(const Row& row, std::string_view column) const;

 private:
  std::vector<std::string> header_;
  std::vector<Row> rows_;
};

/// Quotes a field only when it contains a comma, quote or line break.
std::string escape(std::string_view field);
std::string join(const std::vector<std::string>& fields);

}  // namespace testbed::csv

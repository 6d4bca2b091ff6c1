#include "testbed/common/csv.hpp"

#include <algorithm>

namespace testbed::csv {

std::vector<Row> parse(std::string_view document) {
  std::vector<Row> rows;
  std::size_t line = 1;
  std::size_t i = 0;
  const std::size_t n = document.size();

  while (i < n) {
    // Skip blank lines between records.
    if (document[i] == '\n' || (document[i] == '\r' && i + 1 < n && document[i + 1] == '\n')) {
      i += document[i] == '\r' ? 2 : 1;
      ++line;
      continue;
    }
    Row row;
    row.line = line;
    std::string field;
    bool at_field_start = true;
    bool record_done = false;
    while (!record_done) {
      if (i >= n) {
        row.fields.push_back(std::move(field));
        break;
      }
      char c = document[i];
      if (at_field_start && c == '"') {
        ++i;
        for (;;) {
          if (i >= n) throw CsvError(row.line, "unterminated quoted field");
          if (document[i] == '"') {
            if (i + 1 < n && document[i + 1] == '"') {
              field.push_back('"');
              i += 2;
              continue;
            }
            ++i;
            break;
          }
          if (document[i] == '\n') ++line;
          field.push_back(document[i++]);
        }
        at_field_start = false;
        if (i < n && document[i] != ',' && document[i] != '\n' && document[i] != '\r')
          throw CsvError(line, "unexpected character after closing quote");
        continue;
      }
      if (c == ',') {
        row.fields.push_back(std::move(field));
        field.clear();
        at_field_start = true;
        ++i;
      } else if (c == '\n' || c == '\r') {
        if (c == '\r') {
          if (i + 1 >= n || document[i + 1] != '\n') throw CsvError(line, "bare carriage return");
          ++i;
        }
        ++i;
        ++line;
        row.fields.push_back(std::move(field));
        record_done = true;
      } else {
        if (c == '"') throw CsvError(line, "quote inside unquoted field");
        field.push_back(c);
        at_field_start = false;
        ++i;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Table::Table(std::string_view document, const std::vector<std::string>& expected) {
  auto rows = parse(document);
  if (rows.empty()) throw CsvError(1, "missing header row");
  header_ = std::move(rows.front().fields);
  if (header_ != expected) {
    std::string want;
    for (const auto& col : expected) want += (want.empty() ? "" : ",") + col;
    throw CsvError(rows.front().line, "header must be '" + want + "'");
  }
  rows_.assign(std::make_move_iterator(rows.begin() + 1), std::make_move_iterator(rows.end()));
  for (const auto& row : rows_) {
    if (row.fields.size() > header_.size())
      throw CsvError(row.line, "expected at most " + std::to_string(header_.size()) + " fields, found " +
                                   std::to_string(row.fields.size()));
  }
}

const std::string& Table::field(const Row& row, std::string_view column) const {
  static const std::string empty;
  auto it = std::find(header_.begin(), header_.end(), column);
  if (it == header_.end()) throw CsvError(row.line, "no column '" + std::string(column) + "'");
  auto index = static_cast<std::size_t>(it - header_.begin());
  return index < row.fields.size() ? row.fields[index] : empty;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(fields[i]);
  }
  return out;
}

}  // namespace testbed::csv

#pragma once
// RFC 4180 reader: quoted fields, doubled quotes, embedded separators and
// line breaks, CRLF or LF record endings.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "taskvis/error.hpp"

namespace taskvis::csv {

struct Record {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> cells;
};

inline std::vector<Record> parse(std::string_view text, char sep = ',') {
  std::vector<Record> records;
  Record current;
  std::string cell;
  bool in_quotes = false;
  bool cell_was_quoted = false;
  bool record_has_content = false;
  std::size_t line = 1;
  std::size_t quote_line = 0;
  current.line = 1;

  auto end_cell = [&] {
    current.cells.push_back(std::move(cell));
    cell.clear();
    cell_was_quoted = false;
  };
  auto end_record = [&] {
    end_cell();
    // A blank line produces a single empty unquoted cell; skip it.
    if (record_has_content) records.push_back(std::move(current));
    current = Record{};
    record_has_content = false;
  };

  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        cell.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      if (!cell.empty() || cell_was_quoted) {
        throw IngestionError("stray quote inside unquoted field at line " + std::to_string(line), line);
      }
      in_quotes = true;
      cell_was_quoted = true;
      record_has_content = true;
      quote_line = line;
      if (current.cells.empty() && cell.empty()) current.line = line;
    } else if (c == sep) {
      if (!record_has_content) current.line = line;
      record_has_content = true;
      end_cell();
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_record();
      ++line;
      current.line = line;
    } else {
      if (!record_has_content) current.line = line;
      record_has_content = true;
      cell.push_back(c);
    }
  }
  if (in_quotes) throw IngestionError("unterminated quoted field starting at line " + std::to_string(quote_line), quote_line);
  if (record_has_content || !cell.empty()) end_record();
  return records;
}

}  // namespace taskvis::csv

#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "perfpred/common.hpp"

namespace perfpred {

struct CsvRow {
  long line = 0;  // 1-based line of the first character of the row
  std::vector<std::string> fields;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << content;
}

// RFC-4180 style: quoted fields may contain commas, quotes ("") and newlines.
// CRLF line endings are accepted.
inline std::vector<CsvRow> read_csv(const std::string& path) {
  const std::string text = read_file(path);
  std::vector<CsvRow> rows;
  CsvRow row;
  row.line = 1;
  std::string field;
  long line = 1;
  bool in_quotes = false;
  bool row_has_content = false;

  auto end_field = [&] {
    row.fields.push_back(field);
    field.clear();
  };
  auto end_row = [&] {
    if (row_has_content || !row.fields.empty()) {
      end_field();
      rows.push_back(row);
    }
    row.fields.clear();
    row_has_content = false;
    row.line = line;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') ++line;
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        row_has_content = true;
        break;
      case ',':
        end_field();
        row_has_content = true;
        break;
      case '\r':
        break;
      case '\n':
        row.line = line - 1;
        end_row();
        break;
      default:
        field.push_back(c);
        row_has_content = true;
    }
  }
  if (in_quotes) throw ValidationError(path + ": unterminated quoted field");
  row.line = line;
  end_row();
  return rows;
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

inline std::string csv_line(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += csv_quote(fields[i]);
  }
  out.push_back('\n');
  return out;
}

// Plain tab-separated rows, no quoting; fields may not contain tabs.
inline std::vector<CsvRow> read_tsv(const std::string& path) {
  const std::string text = read_file(path);
  std::vector<CsvRow> rows;
  long line = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    ++line;
    std::string raw = text.substr(pos, nl - pos);
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (!raw.empty()) {
      CsvRow row;
      row.line = line;
      std::size_t start = 0;
      while (true) {
        std::size_t tab = raw.find('\t', start);
        if (tab == std::string::npos) {
          row.fields.push_back(raw.substr(start));
          break;
        }
        row.fields.push_back(raw.substr(start, tab - start));
        start = tab + 1;
      }
      rows.push_back(std::move(row));
    }
    pos = nl + 1;
  }
  return rows;
}

inline double parse_double(const std::string& s, const std::string& context) {
  const char* begin = s.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end != begin + s.size() || s.empty() || errno == ERANGE)
    throw ValidationError(context + ": not a number: '" + s + "'");
  return v;
}

inline std::int64_t parse_int(const std::string& s, const std::string& context) {
  std::int64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ValidationError(context + ": not an integer: '" + s + "'");
  return v;
}

}  // namespace perfpred

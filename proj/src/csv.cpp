#include "clonevet/csv.hpp"

#include <charconv>

#include "clonevet/error.hpp"

namespace clonevet::csv {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void malformed(int line, const std::string& what) {
  throw Error(ErrorCode::MalformedCSV,
              "line " + std::to_string(line) + ": " + what);
}

}  // namespace

std::vector<Row> read_rows(std::string_view text) {
  std::vector<Row> rows;
  std::size_t i = 0;
  int line = 1;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;
  while (i < text.size()) {
    Row row;
    row.line = line;
    std::string field;
    bool quoted_field = false;
    bool any = false;
    auto finish_field = [&] {
      row.fields.push_back(quoted_field ? field : std::string(trim(field)));
      field.clear();
      quoted_field = false;
    };
    while (i < text.size()) {
      const char c = text[i];
      if (c == '"' && trim(field).empty() && !quoted_field) {
        quoted_field = true;
        field.clear();
        ++i;
        const int start_line = line;
        while (true) {
          if (i >= text.size()) malformed(start_line, "unterminated quoted field");
          if (text[i] == '"') {
            if (i + 1 < text.size() && text[i + 1] == '"') {
              field.push_back('"');
              i += 2;
              continue;
            }
            ++i;
            break;
          }
          if (text[i] == '\n') ++line;
          field.push_back(text[i++]);
        }
        any = true;
        continue;
      }
      if (c == ',') {
        finish_field();
        any = true;
        ++i;
        continue;
      }
      if (c == '\r' || c == '\n') {
        if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
        ++i;
        ++line;
        break;
      }
      if (!quoted_field) field.push_back(c);
      if (c != ' ' && c != '\t') any = true;
      ++i;
    }
    if (!any && trim(field).empty()) continue;
    finish_field();
    rows.push_back(std::move(row));
  }
  return rows;
}

int parse_int(std::string_view s, int line) {
  int v = 0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || s.empty()) {
    malformed(line, "expected integer, got '" + std::string(s) + "'");
  }
  return v;
}

std::pair<MethodLocation, MethodLocation> parse_pair_columns(const Row& row,
                                                             std::size_t offset) {
  if (row.fields.size() < offset + 8) {
    malformed(row.line, "expected " + std::to_string(offset + 8) +
                            " columns, found " + std::to_string(row.fields.size()));
  }
  auto side = [&](std::size_t o) {
    MethodLocation m;
    m.folder = row.fields[o];
    m.file = row.fields[o + 1];
    m.start_line = parse_int(row.fields[o + 2], row.line);
    m.end_line = parse_int(row.fields[o + 3], row.line);
    if (m.start_line < 1 || m.end_line < m.start_line) {
      malformed(row.line, "invalid line span " + row.fields[o + 2] + "-" +
                              row.fields[o + 3]);
    }
    return m;
  };
  return {side(offset), side(offset + 4)};
}

std::vector<UploadRow> parse_upload(std::string_view text) {
  std::vector<UploadRow> out;
  bool first = true;
  for (const Row& row : read_rows(text)) {
    if (first) {
      first = false;
      if (!row.fields.empty() && row.fields[0] == "folder_name_1") {
        if (row.fields.size() != 8) malformed(row.line, "header must have 8 columns");
        continue;
      }
    }
    if (row.fields.size() != 8) {
      malformed(row.line, "expected 8 columns, found " +
                              std::to_string(row.fields.size()));
    }
    auto [a, b] = parse_pair_columns(row);
    out.push_back(UploadRow{row.line, std::move(a), std::move(b)});
  }
  return out;
}

std::string escape_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

std::string pair_columns(const PairKey& key) {
  auto side = [](const MethodLocation& m) {
    return escape_field(m.folder) + "," + escape_field(m.file) + "," +
           std::to_string(m.start_line) + "," + std::to_string(m.end_line);
  };
  return side(key.first()) + "," + side(key.second());
}

}  // namespace clonevet::csv

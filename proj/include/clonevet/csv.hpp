#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "clonevet/pair_key.hpp"

namespace clonevet::csv {

struct Row {
  int line = 0;  // 1-based physical line of the record
  std::vector<std::string> fields;
};

/// Splits CSV text into records. Blank lines are skipped; fields may be
/// double-quoted with "" escapes; surrounding whitespace of unquoted fields
/// is trimmed. Throws Error(MalformedCSV) on an unterminated quote.
std::vector<Row> read_rows(std::string_view text);

/// Column names of the detector upload format.
inline constexpr std::string_view kUploadHeader =
    "folder_name_1,file_name_1,start_line_1,end_line_1,"
    "folder_name_2,file_name_2,start_line_2,end_line_2";

struct UploadRow {
  int line = 0;
  MethodLocation left;
  MethodLocation right;
  PairKey key() const { return PairKey(left, right); }
};

/// Parses the 8-column upload format (header optional). Throws
/// Error(MalformedCSV) naming the line of the first bad record.
std::vector<UploadRow> parse_upload(std::string_view text);

/// Parses columns [offset, offset+8) of `row` as a pair of locations.
/// Throws Error(MalformedCSV).
std::pair<MethodLocation, MethodLocation> parse_pair_columns(const Row& row,
                                                             std::size_t offset = 0);

int parse_int(std::string_view s, int line);
std::string escape_field(std::string_view s);
/// The eight key columns of `key`, escaped and comma-joined.
std::string pair_columns(const PairKey& key);

}  // namespace clonevet::csv

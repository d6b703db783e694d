#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clonevet/rational.hpp"

namespace clonevet::java {

/// A Java file inside a corpus. (folder_name, file_name) identifies it.
struct SourceFile {
  std::filesystem::path corpus_root;
  std::string folder_name;
  std::string file_name;
  std::string content;
};

/// A located method or constructor declaration.
struct MethodRecord {
  std::shared_ptr<const SourceFile> file;
  int start_line = 0;
  int end_line = 0;
  /// File content restricted to lines [start_line, end_line].
  std::string source;
  /// The declaration itself, from its first annotation/modifier through the
  /// closing brace. This is what gets hashed, parsed and measured.
  std::string text;
  /// Non-comment, non-whitespace tokens of `text`.
  int language_token_count = 0;

  const std::string& folder_name() const;
  const std::string& file_name() const;

  /// Builds a free-standing record whose whole text is one declaration.
  /// Lexes `text` (throws LexError).
  static MethodRecord from_text(std::string text, std::string folder = "",
                                std::string file = "", int start_line = 1);
};

/// Every method and constructor with a body, in source order. Methods of
/// nested, local and anonymous classes are separate records. Throws LexError
/// for unlexable files and Error(ParseError) for unbalanced structure;
/// records that would duplicate an earlier (start_line, end_line) span are
/// dropped and reported through `diagnostics`.
std::vector<MethodRecord> extract_methods(
    const std::shared_ptr<const SourceFile>& file,
    std::vector<std::string>* diagnostics = nullptr);

/// shared lines / union lines of two inclusive line spans.
Rational line_overlap_ratio(int a_start, int a_end, int b_start, int b_end);

/// Minimum overlap ratio for a requested span to match a method.
inline const Rational kSpanMatchThreshold{7, 10};

/// Best method for a requested span: ratio ≥ 0.7, ties broken by larger
/// ratio, then earlier start_line. nullptr when nothing qualifies.
const MethodRecord* best_span_match(std::span<const MethodRecord> methods,
                                    int start_line, int end_line);

/// Lines [start_line, end_line] of `content` (1-based, inclusive), with the
/// line terminators between them.
std::string slice_lines(std::string_view content, int start_line, int end_line);

}  // namespace clonevet::java

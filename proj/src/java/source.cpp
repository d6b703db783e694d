#include "clonevet/java/source.hpp"

#include <algorithm>
#include <set>
#include <string_view>

#include "clonevet/error.hpp"
#include "clonevet/java/lexer.hpp"

namespace clonevet::java {

const std::string& MethodRecord::folder_name() const {
  static const std::string empty;
  return file ? file->folder_name : empty;
}

const std::string& MethodRecord::file_name() const {
  static const std::string empty;
  return file ? file->file_name : empty;
}

MethodRecord MethodRecord::from_text(std::string text, std::string folder,
                                     std::string file_name, int start_line) {
  auto sf = std::make_shared<SourceFile>();
  sf->folder_name = std::move(folder);
  sf->file_name = std::move(file_name);
  sf->content = text;

  MethodRecord m;
  m.file = std::move(sf);
  m.start_line = start_line;
  int lines = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\n' || (text[i] == '\r' && (i + 1 >= text.size() || text[i + 1] != '\n'))) {
      ++lines;
    }
  }
  m.end_line = start_line + lines;
  m.language_token_count = static_cast<int>(lex_significant(text).size());
  m.source = text;
  m.text = std::move(text);
  return m;
}

std::string slice_lines(std::string_view content, int start_line,
                        int end_line) {
  std::size_t begin = std::string_view::npos;
  std::size_t end = content.size();
  int line = 1;
  if (start_line <= 1) begin = 0;
  for (std::size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    bool newline = c == '\n' || (c == '\r' && (i + 1 >= content.size() || content[i + 1] != '\n'));
    if (!newline) continue;
    if (line == end_line) {
      end = i;
      if (c == '\n' && i > 0 && content[i - 1] == '\r') end = i - 1;
      break;
    }
    ++line;
    if (line == start_line) begin = i + 1;
  }
  if (begin == std::string_view::npos || begin > end) return {};
  return std::string(content.substr(begin, end - begin));
}

namespace {

bool is_modifier(const Token& t) {
  static const std::set<std::string, std::less<>> kMods = {
      "public",   "private",  "protected",    "static", "final",
      "abstract", "native",   "synchronized", "strictfp", "transient",
      "volatile", "default"};
  if (t.kind == TokenKind::Keyword) return kMods.contains(t.lexeme);
  if (t.kind == TokenKind::Identifier) {
    return t.lexeme == "sealed" || t.lexeme == "non";  // non-sealed
  }
  return false;
}

// Structural scanner over the significant tokens of a compilation unit. It
// only recognizes enough of the grammar to find declarations with bodies.
class DeclarationScanner {
 public:
  DeclarationScanner(const std::vector<Token>& toks,
                     std::vector<std::pair<std::size_t, std::size_t>>& out)
      : t_(toks), out_(out) {}

  // Top level: type declarations, or bare members when the file is a
  // fragment without an enclosing class.
  void scan_unit() {
    std::size_t i = 0;
    while (i < t_.size()) {
      if (is(i, "package") || is(i, "import")) {
        while (i < t_.size() && !is(i, ";")) ++i;
        ++i;
        continue;
      }
      i = class_body(i, false, true);
    }
  }

 private:
  bool is(std::size_t i, std::string_view lexeme) const {
    return i < t_.size() && t_[i].lexeme == lexeme &&
           t_[i].kind != TokenKind::StringLiteral &&
           t_[i].kind != TokenKind::CharLiteral;
  }
  bool ident(std::size_t i) const {
    return i < t_.size() && t_[i].kind == TokenKind::Identifier;
  }
  [[noreturn]] void fail(std::size_t i, const std::string& what) const {
    const Token& tok = i < t_.size() ? t_[i] : t_.back();
    throw Error(ErrorCode::ParseError, what + " at " + std::to_string(tok.line) +
                                           ":" + std::to_string(tok.col));
  }

  // If a type declaration (class/interface/enum/@interface/record) starts at
  // i, returns the index just after its opening brace.
  std::optional<std::size_t> type_declaration_body(std::size_t i) const {
    const bool prev_dot = i > 0 && (is(i - 1, ".") || is(i - 1, "::"));
    bool decl = false;
    if (!prev_dot && (is(i, "class") || is(i, "interface") || is(i, "enum")) &&
        ident(i + 1)) {
      decl = true;
    } else if (ident(i) && t_[i].lexeme == "record" && ident(i + 1) &&
               (is(i + 2, "(") || is(i + 2, "<"))) {
      decl = true;
    }
    if (!decl) return std::nullopt;
    std::size_t j = i + 2;
    while (j < t_.size() && !is(j, "{")) {
      if (is(j, ";")) return std::nullopt;
      if (is(j, "(")) j = skip_balanced(j, "(", ")");
      else ++j;
    }
    if (j >= t_.size()) fail(i, "type declaration without body");
    return j + 1;
  }

  // Index just past the closer matching the opener at i.
  std::size_t skip_balanced(std::size_t i, std::string_view open,
                            std::string_view close) const {
    int depth = 0;
    for (std::size_t j = i; j < t_.size(); ++j) {
      if (is(j, open)) ++depth;
      else if (is(j, close) && --depth == 0) return j + 1;
    }
    fail(i, "unbalanced '" + std::string(open) + "'");
  }

  std::size_t skip_annotation(std::size_t i) const {
    ++i;  // '@'
    while (ident(i) || is(i, ".")) ++i;
    if (is(i, "(")) i = skip_balanced(i, "(", ")");
    return i;
  }

  // Scans a region of statements or an initializer (starting at the opener
  // `{` at i when braced) for nested type bodies and anonymous classes.
  // Stops at the first unmatched `}` (returned) or, when `stop_at_semicolon`,
  // at a top-level `;` / `,` / `)` closing the region.
  std::size_t scan_code(std::size_t i, bool stop_at_semicolon) {
    int braces = 0, parens = 0;
    while (i < t_.size()) {
      if (auto body = type_declaration_body(i)) {
        i = class_body(*body, is(i, "enum"));
        continue;
      }
      if (is(i, "new")) {
        if (auto body = anonymous_body(i)) {
          i = class_body(*body, false);
          continue;
        }
      }
      if (is(i, "{")) ++braces;
      else if (is(i, "}")) {
        if (braces == 0) return i;
        if (--braces == 0 && !stop_at_semicolon) return i;
      } else if (is(i, "(")) ++parens;
      else if (is(i, ")")) --parens;
      else if (stop_at_semicolon && braces == 0 && parens == 0 && (is(i, ";") || is(i, ","))) {
        return i;
      }
      ++i;
    }
    fail(t_.empty() ? 0 : t_.size() - 1, "unexpected end of file");
  }

  // `new T<..>(args) {` → index after `{`.
  std::optional<std::size_t> anonymous_body(std::size_t i) const {
    std::size_t j = i + 1;
    while (j < t_.size() && !is(j, "(") && !is(j, "[") && !is(j, "{") &&
           !is(j, ";")) {
      if (is(j, "<")) {
        int depth = 0;
        for (; j < t_.size(); ++j) {
          if (is(j, "<")) ++depth;
          else if (is(j, ">")) depth -= 1;
          else if (is(j, ">>")) depth -= 2;
          else if (is(j, ">>>")) depth -= 3;
          if (depth <= 0) break;
        }
      }
      ++j;
    }
    if (!is(j, "(")) return std::nullopt;
    j = skip_balanced(j, "(", ")");
    if (is(j, "{")) return j + 1;
    return std::nullopt;
  }

  // Members of a class body starting just after `{`; returns the index after
  // the closing `}`.
  std::size_t class_body(std::size_t i, bool is_enum, bool top_level = false) {
    if (is_enum) i = enum_constants(i);
    while (i < t_.size()) {
      if (is(i, "}")) {
        if (!top_level) return i + 1;
        ++i;
        continue;
      }
      if (is(i, ";")) {
        ++i;
        continue;
      }
      const std::size_t member_start = i;
      while (i < t_.size()) {
        if (is(i, "@") && !is(i + 1, "interface")) i = skip_annotation(i);
        else if (is_modifier(t_[i]) && !is(i + 1, "(") && !is(i + 1, "{")) {
          ++i;
          if (is(i, "-")) i += 2;  // non-sealed
        } else {
          break;
        }
      }
      if (is(i, "@") && is(i + 1, "interface")) ++i;
      if (auto body = type_declaration_body(i)) {
        i = class_body(*body, is(i, "enum"));
        continue;
      }
      if (is(i, "{")) {  // initializer block
        i = scan_code(i, false) + 1;
        continue;
      }
      if (ident(i) && is(i + 1, "{")) {  // compact record constructor
        const std::size_t close = scan_code(i + 1, false);
        out_.emplace_back(member_start, close);
        i = close + 1;
        continue;
      }
      i = member(member_start, i);
    }
    if (top_level) return i;
    fail(t_.empty() ? 0 : t_.size() - 1, "unterminated class body");
  }

  std::size_t enum_constants(std::size_t i) {
    while (i < t_.size()) {
      if (is(i, ";")) return i + 1;
      if (is(i, "}")) return i;
      if (is(i, "@")) {
        i = skip_annotation(i);
      } else if (is(i, "(")) {
        i = skip_balanced(i, "(", ")");
      } else if (is(i, "{")) {
        i = class_body(i + 1, false);
      } else {
        ++i;
      }
    }
    return i;
  }

  // A field, method or constructor starting at `start` (modifiers already
  // skipped up to i). Returns the index after the member.
  std::size_t member(std::size_t start, std::size_t i) {
    int angle = 0;
    while (i < t_.size()) {
      if (is(i, "<")) ++angle;
      else if (is(i, ">")) --angle;
      else if (is(i, ">>")) angle -= 2;
      else if (is(i, ">>>")) angle -= 3;
      else if (angle <= 0 && is(i, "(") && i > start && ident(i - 1)) {
        std::size_t j = skip_balanced(i, "(", ")");
        while (is(j, "[") && is(j + 1, "]")) j += 2;
        if (is(j, "throws")) {
          while (j < t_.size() && !is(j, "{") && !is(j, ";")) ++j;
        }
        if (is(j, "default")) {  // annotation element default value
          while (j < t_.size() && !is(j, ";")) ++j;
        }
        if (is(j, "{")) {
          const std::size_t close = scan_code(j, false);
          out_.emplace_back(start, close);
          return close + 1;
        }
        if (is(j, ";")) return j + 1;
        fail(j, "expected method body");
      } else if (angle <= 0 && is(i, "=")) {
        std::size_t j = i + 1;
        while (true) {
          j = scan_code(j, true);
          if (is(j, ",")) {
            ++j;
            continue;
          }
          break;
        }
        if (is(j, "}")) return j;
        return j + 1;
      } else if (angle <= 0 && is(i, ";")) {
        return i + 1;
      } else if (is(i, "}")) {
        return i;
      } else if (is(i, "{")) {
        return scan_code(i, false) + 1;
      }
      ++i;
    }
    fail(start, "unterminated member");
  }

  const std::vector<Token>& t_;
  std::vector<std::pair<std::size_t, std::size_t>>& out_;
};

}  // namespace

std::vector<MethodRecord> extract_methods(
    const std::shared_ptr<const SourceFile>& file,
    std::vector<std::string>* diagnostics) {
  const std::vector<Token> toks = lex_significant(file->content);
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  DeclarationScanner(toks, spans).scan_unit();
  std::sort(spans.begin(), spans.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second > b.second;
  });

  std::vector<MethodRecord> out;
  std::set<std::pair<int, int>> seen;
  for (const auto& [first, last] : spans) {
    MethodRecord m;
    m.file = file;
    m.start_line = toks[first].line;
    m.end_line = toks[last].line;
    if (!seen.emplace(m.start_line, m.end_line).second) {
      if (diagnostics) {
        diagnostics->push_back(file->folder_name + "/" + file->file_name +
                               ": duplicate method span " +
                               std::to_string(m.start_line) + "-" +
                               std::to_string(m.end_line) + " dropped");
      }
      continue;
    }
    const std::size_t begin = toks[first].offset;
    const std::size_t end = toks[last].offset + toks[last].lexeme.size();
    m.text = file->content.substr(begin, end - begin);
    m.source = slice_lines(file->content, m.start_line, m.end_line);
    m.language_token_count = static_cast<int>(last - first + 1);
    out.push_back(std::move(m));
  }
  return out;
}

Rational line_overlap_ratio(int a_start, int a_end, int b_start, int b_end) {
  const int shared = std::min(a_end, b_end) - std::max(a_start, b_start) + 1;
  if (shared <= 0) return Rational(0);
  const int uni = std::max(a_end, b_end) - std::min(a_start, b_start) + 1;
  return Rational(shared, uni);
}

const MethodRecord* best_span_match(std::span<const MethodRecord> methods,
                                    int start_line, int end_line) {
  const MethodRecord* best = nullptr;
  Rational best_ratio;
  for (const MethodRecord& m : methods) {
    const Rational r =
        line_overlap_ratio(m.start_line, m.end_line, start_line, end_line);
    if (r < kSpanMatchThreshold) continue;
    if (!best || r > best_ratio ||
        (r == best_ratio && m.start_line < best->start_line)) {
      best = &m;
      best_ratio = r;
    }
  }
  return best;
}

}  // namespace clonevet::java

#include "clonevet/java/lexer.hpp"

#include <algorithm>
#include <array>

namespace clonevet::java {

const char* to_string(TokenKind kind) noexcept {
  switch (kind) {
    case TokenKind::Identifier: return "identifier";
    case TokenKind::Keyword: return "keyword";
    case TokenKind::Operator: return "operator";
    case TokenKind::Separator: return "separator";
    case TokenKind::IntegerLiteral: return "integer_literal";
    case TokenKind::FloatLiteral: return "float_literal";
    case TokenKind::CharLiteral: return "char_literal";
    case TokenKind::StringLiteral: return "string_literal";
    case TokenKind::BooleanLiteral: return "boolean_literal";
    case TokenKind::NullLiteral: return "null_literal";
    case TokenKind::LineComment: return "line_comment";
    case TokenKind::BlockComment: return "block_comment";
    case TokenKind::Whitespace: return "whitespace";
  }
  return "?";
}

namespace {

// Reserved keywords of the Java language (contextual words such as `var`,
// `yield`, `record` and `sealed` lex as identifiers).
constexpr std::array<std::string_view, 50> kKeywords = {
    "abstract",  "assert",     "boolean",   "break",        "byte",
    "case",      "catch",      "char",      "class",        "const",
    "continue",  "default",    "do",        "double",       "else",
    "enum",      "extends",    "final",     "finally",      "float",
    "for",       "goto",       "if",        "implements",   "import",
    "instanceof", "int",       "interface", "long",         "native",
    "new",       "package",    "private",   "protected",    "public",
    "return",    "short",      "static",    "strictfp",     "super",
    "switch",    "synchronized", "this",    "throw",        "throws",
    "transient", "try",        "void",      "volatile",     "while",
};

// Longest first so that a linear scan yields maximal munch.
constexpr std::array<std::string_view, 38> kOperators = {
    ">>>=", "<<=", ">>=", ">>>", "->", "++", "--", "&&", "||", "==",
    "!=",   "<=",  ">=",  "+=",  "-=", "*=", "/=", "&=", "|=", "^=",
    "%=",   "<<",  ">>",  "=",   ">",  "<",  "!",  "~",  "?",  ":",
    "+",    "-",   "*",   "/",   "&",  "|",  "^",  "%",
};

constexpr std::array<std::string_view, 12> kSeparators = {
    "...", "::", "(", ")", "{", "}", "[", "]", ";", ",", ".", "@",
};

bool is_ascii_ident_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' ||
         c == '$';
}
bool is_ascii_digit(unsigned char c) { return c >= '0' && c <= '9'; }
bool is_hex_digit(unsigned char c) {
  return is_ascii_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}
bool is_layout(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f';
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (pos_ < src_.size()) {
      const std::size_t start = pos_;
      const int line = line_;
      const int col = col_;
      const TokenKind kind = scan_one();
      out.push_back(Token{kind, std::string(src_.substr(start, pos_ - start)),
                          line, col, start});
    }
    return out;
  }

 private:
  unsigned char peek(std::size_t k = 0) const {
    return pos_ + k < src_.size() ? static_cast<unsigned char>(src_[pos_ + k])
                                  : 0;
  }
  bool starts_with(std::string_view s) const {
    return src_.substr(pos_, s.size()) == s;
  }

  // Advances one byte while keeping line/col bookkeeping. CRLF counts as a
  // single line break.
  void advance() {
    const unsigned char c = peek();
    ++pos_;
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else if (c == '\r') {
      if (peek() != '\n') {
        ++line_;
        col_ = 1;
      }
    } else if ((c & 0xC0) != 0x80) {
      ++col_;
    }
  }
  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) advance();
  }

  [[noreturn]] void fail(ErrorCode code, int line, int col,
                         const std::string& what) const {
    throw LexError(code, line, col, what);
  }

  // Length of a valid multi-byte UTF-8 sequence at pos_, or 0.
  std::size_t utf8_length() const {
    const unsigned char c = peek();
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c >= 0xC2 && c <= 0xDF) {
      len = 2;
      cp = c & 0x1F;
    } else if (c >= 0xE0 && c <= 0xEF) {
      len = 3;
      cp = c & 0x0F;
    } else if (c >= 0xF0 && c <= 0xF4) {
      len = 4;
      cp = c & 0x07;
    } else {
      return 0;
    }
    for (std::size_t i = 1; i < len; ++i) {
      const unsigned char cc = peek(i);
      if ((cc & 0xC0) != 0x80) return 0;
      cp = (cp << 6) | (cc & 0x3F);
    }
    if ((len == 3 && cp < 0x800) || (len == 4 && (cp < 0x10000 || cp > 0x10FFFF)) ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
      return 0;
    }
    return len;
  }

  bool at_ident_part() const {
    const unsigned char c = peek();
    if (is_ascii_ident_start(c) || is_ascii_digit(c)) return true;
    return c >= 0x80 && utf8_length() > 0;
  }

  TokenKind scan_one() {
    const unsigned char c = peek();
    if (is_layout(c)) {
      while (pos_ < src_.size() && is_layout(peek())) advance();
      return TokenKind::Whitespace;
    }
    if (starts_with("//")) {
      while (pos_ < src_.size() && peek() != '\n' && peek() != '\r') advance();
      return TokenKind::LineComment;
    }
    if (starts_with("/*")) {
      const int line = line_, col = col_;
      advance(2);
      while (pos_ < src_.size() && !starts_with("*/")) advance();
      if (pos_ >= src_.size()) {
        fail(ErrorCode::UnterminatedComment, line, col, "unterminated comment");
      }
      advance(2);
      return TokenKind::BlockComment;
    }
    if (starts_with("\"\"\"")) return scan_text_block();
    if (c == '"') return scan_quoted('"', TokenKind::StringLiteral);
    if (c == '\'') return scan_quoted('\'', TokenKind::CharLiteral);
    if (is_ascii_digit(c) || (c == '.' && is_ascii_digit(peek(1)))) {
      return scan_number();
    }
    if (is_ascii_ident_start(c) || (c >= 0x80 && utf8_length() > 0)) {
      return scan_word();
    }
    for (std::string_view sep : kSeparators) {
      if (starts_with(sep)) {
        advance(sep.size());
        return TokenKind::Separator;
      }
    }
    for (std::string_view op : kOperators) {
      if (starts_with(op)) {
        advance(op.size());
        return TokenKind::Operator;
      }
    }
    fail(ErrorCode::InvalidCharacter, line_, col_, "invalid character");
  }

  TokenKind scan_word() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && at_ident_part()) {
      const std::size_t n = peek() >= 0x80 ? utf8_length() : 1;
      advance(n);
    }
    const std::string_view word = src_.substr(start, pos_ - start);
    if (word == "true" || word == "false") return TokenKind::BooleanLiteral;
    if (word == "null") return TokenKind::NullLiteral;
    if (is_java_keyword(word)) return TokenKind::Keyword;
    return TokenKind::Identifier;
  }

  TokenKind scan_quoted(char quote, TokenKind kind) {
    const int line = line_, col = col_;
    advance();
    while (true) {
      if (pos_ >= src_.size() || peek() == '\n' || peek() == '\r') {
        fail(ErrorCode::UnterminatedString, line, col,
             kind == TokenKind::CharLiteral ? "unterminated character literal"
                                            : "unterminated string literal");
      }
      const unsigned char c = peek();
      if (c == '\\') {
        advance();
        if (pos_ >= src_.size() || peek() == '\n' || peek() == '\r') continue;
        advance();
        continue;
      }
      advance();
      if (c == static_cast<unsigned char>(quote)) break;
    }
    return kind;
  }

  TokenKind scan_text_block() {
    const int line = line_, col = col_;
    advance(3);
    while (true) {
      if (pos_ >= src_.size()) {
        fail(ErrorCode::UnterminatedString, line, col,
             "unterminated text block");
      }
      if (peek() == '\\') {
        advance();
        if (pos_ < src_.size()) advance();
        continue;
      }
      if (starts_with("\"\"\"")) {
        advance(3);
        break;
      }
      advance();
    }
    return TokenKind::StringLiteral;
  }

  void digits(bool hex) {
    while (pos_ < src_.size() &&
           ((hex ? is_hex_digit(peek()) : is_ascii_digit(peek())) ||
            peek() == '_')) {
      advance();
    }
  }

  TokenKind scan_number() {
    bool is_float = false;
    if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
      advance(2);
      digits(true);
      if (peek() == '.') {
        is_float = true;
        advance();
        digits(true);
      }
      if (peek() == 'p' || peek() == 'P') {
        is_float = true;
        advance();
        if (peek() == '+' || peek() == '-') advance();
        digits(false);
      }
    } else if (peek() == '0' && (peek(1) == 'b' || peek(1) == 'B')) {
      advance(2);
      digits(false);
    } else {
      digits(false);
      if (peek() == '.' && peek(1) != '.') {
        is_float = true;
        advance();
        digits(false);
      }
      if ((peek() == 'e' || peek() == 'E') &&
          (is_ascii_digit(peek(1)) ||
           ((peek(1) == '+' || peek(1) == '-') && is_ascii_digit(peek(2))))) {
        is_float = true;
        advance();
        if (peek() == '+' || peek() == '-') advance();
        digits(false);
      }
    }
    const unsigned char s = peek();
    if (s == 'l' || s == 'L') {
      advance();
    } else if (s == 'f' || s == 'F' || s == 'd' || s == 'D') {
      is_float = true;
      advance();
    }
    return is_float ? TokenKind::FloatLiteral : TokenKind::IntegerLiteral;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

bool is_java_keyword(std::string_view word) noexcept {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::vector<Token> lex(std::string_view source) { return Lexer(source).run(); }

std::vector<Token> lex_significant(std::string_view source) {
  std::vector<Token> all = lex(source);
  std::erase_if(all, [](const Token& t) { return t.is_trivia(); });
  return all;
}

}  // namespace clonevet::java

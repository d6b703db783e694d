#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "clonevet/error.hpp"

namespace clonevet::java {

enum class TokenKind {
  Identifier,
  Keyword,
  Operator,
  Separator,
  IntegerLiteral,
  FloatLiteral,
  CharLiteral,
  StringLiteral,
  BooleanLiteral,
  NullLiteral,
  LineComment,
  BlockComment,
  Whitespace,
};

const char* to_string(TokenKind kind) noexcept;

struct Token {
  TokenKind kind;
  std::string lexeme;
  int line = 1;  // 1-based
  int col = 1;   // 1-based, counted in code points
  std::size_t offset = 0;

  bool is_trivia() const noexcept {
    return kind == TokenKind::Whitespace || kind == TokenKind::LineComment ||
           kind == TokenKind::BlockComment;
  }
  bool is_comment() const noexcept {
    return kind == TokenKind::LineComment || kind == TokenKind::BlockComment;
  }
  bool is_literal() const noexcept {
    switch (kind) {
      case TokenKind::IntegerLiteral:
      case TokenKind::FloatLiteral:
      case TokenKind::CharLiteral:
      case TokenKind::StringLiteral:
      case TokenKind::BooleanLiteral:
      case TokenKind::NullLiteral:
        return true;
      default:
        return false;
    }
  }
};

/// Lexing failure with the position of the offending construct.
class LexError : public Error {
 public:
  LexError(ErrorCode code, int line, int col, const std::string& what)
      : Error(code, what + " at " + std::to_string(line) + ":" +
                        std::to_string(col)),
        line_(line),
        col_(col) {}
  int line() const noexcept { return line_; }
  int col() const noexcept { return col_; }

 private:
  int line_;
  int col_;
};

/// Lossless tokenization: concatenating every lexeme reproduces `source`.
/// Throws LexError (UnterminatedString, UnterminatedComment,
/// InvalidCharacter).
std::vector<Token> lex(std::string_view source);

/// Lexes and drops whitespace and comments.
std::vector<Token> lex_significant(std::string_view source);

bool is_java_keyword(std::string_view word) noexcept;

}  // namespace clonevet::java

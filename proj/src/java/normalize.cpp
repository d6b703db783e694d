#include "clonevet/java/normalize.hpp"

#include "clonevet/java/lexer.hpp"

namespace clonevet::java {

std::string strip_comments(std::string_view source) {
  std::string out;
  out.reserve(source.size());
  for (const Token& t : lex(source)) {
    if (!t.is_comment()) out += t.lexeme;
  }
  return out;
}

std::string normalize_layout(std::string_view source) {
  std::string out;
  out.reserve(source.size());
  for (char c : source) {
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f') continue;
    out.push_back(c);
  }
  return out;
}

std::string type1_normal_form(std::string_view source) {
  return normalize_layout(strip_comments(source));
}

}  // namespace clonevet::java

#include "clonevet/analysis.hpp"

#include <algorithm>

#include "clonevet/digest.hpp"
#include "clonevet/error.hpp"
#include "clonevet/java/lexer.hpp"
#include "clonevet/java/normalize.hpp"

namespace clonevet {

MethodLocation location_of(const java::MethodRecord& record) {
  return MethodLocation{record.folder_name(), record.file_name(),
                        record.start_line, record.end_line};
}

namespace {

std::string normalized(const java::Token& t) {
  using java::TokenKind;
  switch (t.kind) {
    case TokenKind::Identifier: return "$ID";
    case TokenKind::IntegerLiteral:
    case TokenKind::FloatLiteral: return "$NUM";
    case TokenKind::CharLiteral: return "$CHAR";
    case TokenKind::StringLiteral: return "$STR";
    case TokenKind::BooleanLiteral: return "$BOOL";
    case TokenKind::NullLiteral: return "$NULL";
    default: return t.lexeme;
  }
}

}  // namespace

AnalyzedMethod AnalyzedMethod::analyze(java::MethodRecord record) {
  AnalyzedMethod a;
  a.location = location_of(record);
  a.record = std::move(record);
  try {
    const std::vector<java::Token> toks = java::lex(a.record.text);
    std::string stripped;
    for (const java::Token& t : toks) {
      if (t.is_comment()) continue;
      stripped += t.lexeme;
      if (t.is_trivia()) continue;
      ++a.normalized_tokens[normalized(t)];
      ++a.normalized_token_total;
    }
    a.type1_digest = sha256_hex(java::normalize_layout(stripped));
  } catch (const Error& e) {
    a.lex_error = e.what();
    return a;
  }
  try {
    a.summary = java::parse_method(a.record);
    a.metrics = metrics::compute_metrics(*a.summary);
    a.actions = action::extract_action_tokens(*a.summary);
  } catch (const Error& e) {
    a.parse_error = e.what();
    a.summary.reset();
  }
  return a;
}

std::shared_ptr<const AnalyzedMethod> AnalyzedMethod::make_shared(
    java::MethodRecord record) {
  return std::make_shared<const AnalyzedMethod>(analyze(std::move(record)));
}

Rational syntactic_similarity(const AnalyzedMethod& a, const AnalyzedMethod& b) {
  const int denom = std::max(a.normalized_token_total, b.normalized_token_total);
  if (denom == 0) return Rational(0);
  std::int64_t shared = 0;
  for (const auto& [tok, freq] : a.normalized_tokens) {
    if (auto it = b.normalized_tokens.find(tok); it != b.normalized_tokens.end()) {
      shared += std::min(freq, it->second);
    }
  }
  return Rational(shared, denom);
}

}  // namespace clonevet

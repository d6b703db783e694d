#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <string_view>

#include "clonevet/error.hpp"
#include "clonevet/java/lexer.hpp"
#include "clonevet/java/summary.hpp"

namespace clonevet::java {

const char* to_string(StatementKind kind) noexcept {
  switch (kind) {
    case StatementKind::LocalVariable: return "local_variable";
    case StatementKind::Expression: return "expression";
    case StatementKind::If: return "if";
    case StatementKind::For: return "for";
    case StatementKind::ForEach: return "foreach";
    case StatementKind::While: return "while";
    case StatementKind::Do: return "do";
    case StatementKind::Switch: return "switch";
    case StatementKind::SwitchCase: return "switch_case";
    case StatementKind::Try: return "try";
    case StatementKind::Catch: return "catch";
    case StatementKind::Finally: return "finally";
    case StatementKind::Return: return "return";
    case StatementKind::Throw: return "throw";
    case StatementKind::Break: return "break";
    case StatementKind::Continue: return "continue";
    case StatementKind::Block: return "block";
    case StatementKind::ClassBody: return "class_body";
    case StatementKind::Labeled: return "labeled";
    case StatementKind::Synchronized: return "synchronized";
    case StatementKind::Assert: return "assert";
    case StatementKind::Yield: return "yield";
    case StatementKind::LocalClass: return "local_class";
    case StatementKind::Empty: return "empty";
  }
  return "?";
}

bool is_counted(StatementKind kind) noexcept {
  switch (kind) {
    case StatementKind::SwitchCase:
    case StatementKind::Catch:
    case StatementKind::Finally:
    case StatementKind::Block:
    case StatementKind::ClassBody:
    case StatementKind::Empty:
      return false;
    default:
      return true;
  }
}

namespace {

const std::set<std::string, std::less<>> kPrimitives = {
    "boolean", "byte", "char", "short", "int", "long", "float", "double"};

const std::set<std::string, std::less<>> kControlKeywords = {
    "if",    "else",  "for",     "while",      "do",           "switch",
    "case",  "default", "try",   "catch",      "finally",      "return",
    "throw", "break", "continue", "new",       "instanceof",   "synchronized",
    "assert"};

const std::set<std::string, std::less<>> kAssignmentOps = {
    "=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>="};

const std::set<std::string, std::less<>> kMemberModifiers = {
    "public",   "private",  "protected",    "static",   "final",
    "abstract", "native",   "synchronized", "strictfp", "transient",
    "volatile", "default"};

int binary_precedence(const Token& t) {
  if (t.kind != TokenKind::Operator && t.lexeme != "instanceof") return 0;
  const std::string& s = t.lexeme;
  if (s == "||") return 1;
  if (s == "&&") return 2;
  if (s == "|") return 3;
  if (s == "^") return 4;
  if (s == "&") return 5;
  if (s == "==" || s == "!=") return 6;
  if (s == "<" || s == ">" || s == "<=" || s == ">=" || s == "instanceof") return 7;
  if (s == "<<" || s == ">>" || s == ">>>") return 8;
  if (s == "+" || s == "-") return 9;
  if (s == "*" || s == "/" || s == "%") return 10;
  return 0;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

  MethodSummary run() {
    if (t_.empty()) fail("empty declaration");
    parse_header();
    if (at(";")) {
      ++pos_;
    } else {
      expect("{");
      const std::size_t body_begin = pos_;
      while (!at("}")) {
        if (pos_ >= t_.size()) fail("unterminated method body");
        s_.statements.push_back(parse_statement());
      }
      const std::size_t body_end = pos_;
      ++pos_;
      classify_range(body_begin, body_end, s_.operators, s_.operands,
                     &s_.literals);
    }
    if (pos_ != t_.size()) fail("trailing tokens after method body");
    for (ExpressionInfo& e : s_.expressions) {
      classify_range(e.first_token, e.last_token, e.operators, e.operands,
                     nullptr);
    }
    return std::move(s_);
  }

 private:
  // ---- token helpers -----------------------------------------------------

  bool at(std::string_view lexeme, std::size_t k = 0) const {
    const std::size_t i = pos_ + k;
    return i < t_.size() && t_[i].lexeme == lexeme &&
           t_[i].kind != TokenKind::StringLiteral &&
           t_[i].kind != TokenKind::CharLiteral;
  }
  bool is(std::size_t i, std::string_view lexeme) const {
    return i < t_.size() && t_[i].lexeme == lexeme &&
           t_[i].kind != TokenKind::StringLiteral &&
           t_[i].kind != TokenKind::CharLiteral;
  }
  bool ident_at(std::size_t i) const {
    return i < t_.size() && t_[i].kind == TokenKind::Identifier;
  }
  bool at_ident(std::size_t k = 0) const { return ident_at(pos_ + k); }
  bool primitive_at(std::size_t i) const {
    return i < t_.size() && t_[i].kind == TokenKind::Keyword &&
           kPrimitives.contains(t_[i].lexeme);
  }

  [[noreturn]] void fail(const std::string& what) const {
    if (pos_ < t_.size()) {
      throw Error(ErrorCode::ParseError,
                  what + " near '" + t_[pos_].lexeme + "' at " +
                      std::to_string(t_[pos_].line) + ":" +
                      std::to_string(t_[pos_].col));
    }
    throw Error(ErrorCode::ParseError, what + " at end of input");
  }
  void expect(std::string_view lexeme) {
    if (!at(lexeme)) fail("expected '" + std::string(lexeme) + "'");
    ++pos_;
  }
  std::string expect_ident() {
    if (!at_ident()) fail("expected identifier");
    return t_[pos_++].lexeme;
  }

  std::size_t skip_balanced(std::size_t i, std::string_view open,
                            std::string_view close) const {
    int depth = 0;
    for (std::size_t j = i; j < t_.size(); ++j) {
      if (is(j, open)) ++depth;
      else if (is(j, close) && --depth == 0) return j + 1;
    }
    throw Error(ErrorCode::ParseError,
                "unbalanced '" + std::string(open) + "'");
  }

  std::size_t skip_annotation_at(std::size_t i) const {
    ++i;  // '@'
    if (!ident_at(i)) return i;
    ++i;
    while (is(i, ".") && ident_at(i + 1)) i += 2;
    if (is(i, "(")) i = skip_balanced(i, "(", ")");
    return i;
  }
  std::size_t skip_annotations_at(std::size_t i) const {
    while (is(i, "@") && !is(i + 1, "interface")) i = skip_annotation_at(i);
    return i;
  }
  std::size_t skip_variable_modifiers_at(std::size_t i) const {
    while (true) {
      if (is(i, "final")) ++i;
      else if (is(i, "@") && !is(i + 1, "interface")) i = skip_annotation_at(i);
      else return i;
    }
  }

  // ---- type scanning (side-effect free) -----------------------------------

  std::optional<std::size_t> scan_type_args(std::size_t i) const {
    if (!is(i, "<")) return std::nullopt;
    int depth = 0;
    for (; i < t_.size(); ++i) {
      const Token& t = t_[i];
      if (is(i, "<")) {
        ++depth;
      } else if (is(i, ">")) {
        depth -= 1;
      } else if (is(i, ">>")) {
        depth -= 2;
      } else if (is(i, ">>>")) {
        depth -= 3;
      } else if (is(i, "@")) {
        i = skip_annotation_at(i) - 1;
        continue;
      } else if (t.kind == TokenKind::Identifier || primitive_at(i) ||
                 is(i, ".") || is(i, ",") || is(i, "?") || is(i, "extends") ||
                 is(i, "super") || is(i, "&") || is(i, "[") || is(i, "]")) {
        continue;
      } else {
        return std::nullopt;
      }
      if (depth < 0) return std::nullopt;
      if (depth == 0) return i + 1;
    }
    return std::nullopt;
  }

  // End of a type starting at i (annotations, primitive or qualified class
  // type with type arguments, array dimensions), or nullopt.
  std::optional<std::size_t> scan_type(std::size_t i) const {
    i = skip_annotations_at(i);
    if (primitive_at(i) || is(i, "void")) {
      ++i;
    } else if (ident_at(i)) {
      ++i;
      if (auto e = scan_type_args(i)) i = *e;
      while (is(i, ".") && (ident_at(i + 1) || is(i + 1, "@"))) {
        i = skip_annotations_at(i + 1);
        if (!ident_at(i)) return std::nullopt;
        ++i;
        if (auto e = scan_type_args(i)) i = *e;
      }
    } else {
      return std::nullopt;
    }
    while (true) {
      std::size_t j = skip_annotations_at(i);
      if (is(j, "[") && is(j + 1, "]")) {
        i = j + 2;
      } else {
        break;
      }
    }
    return i;
  }

  std::string join(std::size_t begin, std::size_t end) const {
    std::string out;
    for (std::size_t i = begin; i < end && i < t_.size(); ++i) out += t_[i].lexeme;
    return out;
  }

  std::string last_simple_name(std::size_t begin, std::size_t end) const {
    std::string name;
    for (std::size_t i = begin; i < end; ++i) {
      if (ident_at(i) && !(i > begin && is(i - 1, "@"))) {
        name = t_[i].lexeme;
        if (is(i + 1, "<")) break;
      }
    }
    return name;
  }

  void record_type(std::size_t begin, std::size_t end) {
    if (end == begin + 1 && ident_at(begin) && t_[begin].lexeme == "var") return;
    for (std::size_t i = begin; i < end; ++i) {
      if (is(i, "@")) {
        i = skip_annotation_at(i) - 1;
        continue;
      }
      if (ident_at(i) && !is(i + 1, ".")) {
        s_.referenced_classes.push_back(t_[i].lexeme);
      }
    }
  }

  // Consumes a type at pos_, recording its class references.
  std::pair<std::size_t, std::size_t> consume_type() {
    const auto e = scan_type(pos_);
    if (!e) fail("expected type");
    const std::size_t begin = pos_;
    record_type(begin, *e);
    pos_ = *e;
    return {begin, *e};
  }

  bool looks_like_local_decl(std::size_t i) const {
    i = skip_variable_modifiers_at(i);
    const auto e = scan_type(i);
    if (!e || !ident_at(*e)) return false;
    const std::size_t n = *e + 1;
    return is(n, "=") || is(n, ";") || is(n, ",") || is(n, "[") || is(n, ":");
  }

  // ---- statement context ---------------------------------------------------

  template <class F>
  Statement make_statement(StatementKind kind, F&& body) {
    Statement st;
    st.kind = kind;
    auto* saved_roots = roots_;
    auto* saved_nested = nested_;
    roots_ = &st.expressions;
    nested_ = &st.children;
    body(st);
    roots_ = saved_roots;
    nested_ = saved_nested;
    return st;
  }

  void declare(const std::string& name) {
    declared_.insert(name);
    s_.declared_variables.push_back(name);
  }

  void root_expression() {
    const std::size_t begin = pos_;
    parse_expr();
    add_root(begin);
  }
  void root_initializer() {
    const std::size_t begin = pos_;
    if (at("{")) parse_array_initializer();
    else parse_expr();
    add_root(begin);
  }
  void add_root(std::size_t begin) {
    if (!roots_) fail("expression outside statement");
    s_.expressions.push_back(ExpressionInfo{begin, pos_, {}, {}});
    roots_->push_back(s_.expressions.size() - 1);
  }

  // ---- declaration header --------------------------------------------------

  void parse_header() {
    while (true) {
      if (at("@") && !at("interface", 1)) {
        pos_ = skip_annotation_at(pos_);
      } else if (pos_ < t_.size() &&
                 ((t_[pos_].kind == TokenKind::Keyword &&
                   kMemberModifiers.contains(t_[pos_].lexeme)) ||
                  (at_ident() && t_[pos_].lexeme == "sealed"))) {
        ++pos_;
      } else {
        break;
      }
    }
    if (at("<")) {
      const auto e = scan_type_args(pos_);
      if (!e) fail("malformed type parameters");
      pos_ = *e;
    }
    if (at_ident() && (at("(", 1) || at("{", 1))) {
      s_.name = t_[pos_++].lexeme;  // constructor (or compact constructor)
    } else {
      consume_type();
      s_.name = expect_ident();
    }
    if (at("{")) return;  // compact record constructor
    expect("(");
    while (!at(")")) {
      pos_ = skip_variable_modifiers_at(pos_);
      auto [tb, te] = consume_type();
      std::string type = join(tb, te);
      if (at("...")) {
        type += "...";
        ++pos_;
      }
      pos_ = skip_annotations_at(pos_);
      if (at("this")) {  // receiver parameter
        ++pos_;
      } else {
        std::string name = expect_ident();
        while (at("[") && at("]", 1)) {
          type += "[]";
          pos_ += 2;
        }
        declared_.insert(name);
        s_.parameters.push_back(Parameter{std::move(type), std::move(name)});
      }
      if (!at(",")) break;
      ++pos_;
    }
    expect(")");
    while (at("[") && at("]", 1)) pos_ += 2;
    if (at("throws")) {
      ++pos_;
      while (true) {
        auto [tb, te] = consume_type();
        const std::string name = last_simple_name(tb, te);
        s_.thrown_exception_types.push_back(name);
        s_.referenced_exception_types.push_back(name);
        if (!at(",")) break;
        ++pos_;
      }
    }
  }

  // ---- statements ----------------------------------------------------------

  Statement parse_block() {
    return make_statement(StatementKind::Block, [&](Statement& st) {
      expect("{");
      while (!at("}")) {
        if (pos_ >= t_.size()) fail("unterminated block");
        st.children.push_back(parse_statement());
      }
      ++pos_;
    });
  }

  bool yield_statement_ahead() const {
    if (!at_ident() || t_[pos_].lexeme != "yield" || pos_ + 1 >= t_.size()) {
      return false;
    }
    const Token& n = t_[pos_ + 1];
    if (n.kind == TokenKind::Operator) {
      return n.lexeme == "-" || n.lexeme == "+" || n.lexeme == "!" ||
             n.lexeme == "~" || n.lexeme == "++" || n.lexeme == "--";
    }
    if (n.kind == TokenKind::Separator) return false;
    return true;
  }

  bool local_class_ahead() const {
    std::size_t i = pos_;
    while (true) {
      if (is(i, "abstract") || is(i, "final") || is(i, "static") ||
          is(i, "strictfp")) {
        ++i;
      } else if (is(i, "@") && !is(i + 1, "interface")) {
        i = skip_annotation_at(i);
      } else {
        break;
      }
    }
    if ((is(i, "class") || is(i, "interface") || is(i, "enum")) &&
        ident_at(i + 1)) {
      return true;
    }
    return ident_at(i) && t_[i].lexeme == "record" && ident_at(i + 1) &&
           (is(i + 2, "(") || is(i + 2, "<"));
  }

  Statement parse_statement() {
    if (pos_ >= t_.size()) fail("unexpected end of input");
    if (at("{")) return parse_block();
    if (at(";")) {
      ++pos_;
      return make_statement(StatementKind::Empty, [](Statement&) {});
    }
    if (at("if")) {
      return make_statement(StatementKind::If, [&](Statement& st) {
        ++pos_;
        expect("(");
        root_expression();
        expect(")");
        st.children.push_back(parse_statement());
        if (at("else")) {
          ++pos_;
          st.children.push_back(parse_statement());
        }
      });
    }
    if (at("while")) {
      return make_statement(StatementKind::While, [&](Statement& st) {
        ++pos_;
        expect("(");
        root_expression();
        expect(")");
        st.children.push_back(parse_statement());
      });
    }
    if (at("do")) {
      return make_statement(StatementKind::Do, [&](Statement& st) {
        ++pos_;
        st.children.push_back(parse_statement());
        expect("while");
        expect("(");
        root_expression();
        expect(")");
        expect(";");
      });
    }
    if (at("for")) return parse_for();
    if (at("switch")) return parse_switch();
    if (at("try")) return parse_try();
    if (at("return")) {
      return make_statement(StatementKind::Return, [&](Statement&) {
        ++pos_;
        if (!at(";")) root_expression();
        expect(";");
      });
    }
    if (at("throw")) {
      return make_statement(StatementKind::Throw, [&](Statement&) {
        ++pos_;
        if (at("new")) {
          if (auto e = scan_type(pos_ + 1)) {
            s_.thrown_exception_types.push_back(last_simple_name(pos_ + 1, *e));
          }
        }
        root_expression();
        expect(";");
      });
    }
    if (at("break") || at("continue")) {
      const auto kind = at("break") ? StatementKind::Break : StatementKind::Continue;
      return make_statement(kind, [&](Statement&) {
        ++pos_;
        if (at_ident()) ++pos_;
        expect(";");
      });
    }
    if (at("synchronized") && at("(", 1)) {
      return make_statement(StatementKind::Synchronized, [&](Statement& st) {
        ++pos_;
        expect("(");
        root_expression();
        expect(")");
        st.children.push_back(parse_block());
      });
    }
    if (at("assert")) {
      return make_statement(StatementKind::Assert, [&](Statement&) {
        ++pos_;
        root_expression();
        if (at(":")) {
          ++pos_;
          root_expression();
        }
        expect(";");
      });
    }
    if (yield_statement_ahead()) {
      return make_statement(StatementKind::Yield, [&](Statement&) {
        contextual_keywords_.insert(pos_);
        ++pos_;
        root_expression();
        expect(";");
      });
    }
    if (at_ident() && at(":", 1)) {
      return make_statement(StatementKind::Labeled, [&](Statement& st) {
        pos_ += 2;
        st.children.push_back(parse_statement());
      });
    }
    if (local_class_ahead()) return parse_local_class();
    if (looks_like_local_decl(pos_)) {
      return make_statement(StatementKind::LocalVariable, [&](Statement&) {
        parse_local_variables();
        expect(";");
      });
    }
    return make_statement(StatementKind::Expression, [&](Statement&) {
      root_expression();
      expect(";");
    });
  }

  // `[final] Type name [= init] {, name [= init]}` without the terminator.
  void parse_local_variables() {
    pos_ = skip_variable_modifiers_at(pos_);
    consume_type();
    while (true) {
      declare(expect_ident());
      while (at("[") && at("]", 1)) pos_ += 2;
      if (at("=")) {
        ++pos_;
        root_initializer();
      }
      if (!at(",")) break;
      ++pos_;
    }
  }

  Statement parse_for() {
    ++pos_;
    expect("(");
    // Enhanced for: [mods] Type name :
    {
      const std::size_t m = skip_variable_modifiers_at(pos_);
      if (const auto e = scan_type(m); e && ident_at(*e) && is(*e + 1, ":")) {
        return make_statement(StatementKind::ForEach, [&](Statement& st) {
          pos_ = m;
          consume_type();
          declare(expect_ident());
          expect(":");
          root_expression();
          expect(")");
          st.children.push_back(parse_statement());
        });
      }
    }
    return make_statement(StatementKind::For, [&](Statement& st) {
      if (!at(";")) {
        if (looks_like_local_decl(pos_)) {
          parse_local_variables();
        } else {
          while (true) {
            root_expression();
            if (!at(",")) break;
            ++pos_;
          }
        }
      }
      expect(";");
      if (!at(";")) root_expression();
      expect(";");
      if (!at(")")) {
        while (true) {
          root_expression();
          if (!at(",")) break;
          ++pos_;
        }
      }
      expect(")");
      st.children.push_back(parse_statement());
    });
  }

  Statement parse_switch() {
    return make_statement(StatementKind::Switch, [&](Statement& st) {
      ++pos_;
      expect("(");
      root_expression();
      expect(")");
      expect("{");
      while (!at("}")) {
        if (pos_ >= t_.size()) fail("unterminated switch");
        if (!at("case") && !at("default")) fail("expected case label");
        st.children.push_back(parse_case_group());
      }
      ++pos_;
    });
  }

  void parse_case_label(Statement& group) {
    // Type pattern: `case Type name`.
    if (const auto e = scan_type(pos_);
        e && ident_at(*e) && t_[*e].lexeme != "when" &&
        (is(*e + 1, "->") || is(*e + 1, ":") || is(*e + 1, ",") ||
         (ident_at(*e + 1) && t_[*e + 1].lexeme == "when"))) {
      consume_type();
      declare(expect_ident());
    } else {
      const bool saved = no_lambda_;
      no_lambda_ = true;
      root_expression();
      no_lambda_ = saved;
    }
    ++group.case_labels;
    if (at_ident() && t_[pos_].lexeme == "when") {
      contextual_keywords_.insert(pos_);
      ++pos_;
      const bool saved = no_lambda_;
      no_lambda_ = true;
      root_expression();
      no_lambda_ = saved;
    }
  }

  Statement parse_case_group() {
    return make_statement(StatementKind::SwitchCase, [&](Statement& st) {
      bool arrow = false;
      while (at("case") || at("default")) {
        if (at("default")) {
          ++pos_;
        } else {
          ++pos_;
          while (true) {
            if (at("default")) {
              ++pos_;
              break;
            }
            parse_case_label(st);
            if (!at(",")) break;
            ++pos_;
          }
        }
        if (at("->")) {
          ++pos_;
          arrow = true;
          break;
        }
        expect(":");
      }
      if (arrow) {
        if (at("{") || at("throw")) {
          st.children.push_back(parse_statement());
        } else {
          st.children.push_back(
              make_statement(StatementKind::Expression, [&](Statement&) {
                root_expression();
                expect(";");
              }));
        }
      } else {
        while (!at("case") && !at("default") && !at("}")) {
          if (pos_ >= t_.size()) fail("unterminated switch");
          st.children.push_back(parse_statement());
        }
      }
    });
  }

  Statement parse_try() {
    return make_statement(StatementKind::Try, [&](Statement& st) {
      ++pos_;
      if (at("(")) {
        ++pos_;
        while (!at(")")) {
          if (looks_like_local_decl(pos_)) {
            pos_ = skip_variable_modifiers_at(pos_);
            consume_type();
            declare(expect_ident());
            expect("=");
            root_expression();
          } else {
            root_expression();
          }
          if (at(";")) ++pos_;
          else break;
        }
        expect(")");
      }
      st.children.push_back(parse_block());
      while (at("catch")) {
        st.children.push_back(
            make_statement(StatementKind::Catch, [&](Statement& c) {
              ++pos_;
              expect("(");
              pos_ = skip_variable_modifiers_at(pos_);
              while (true) {
                auto [tb, te] = consume_type();
                s_.referenced_exception_types.push_back(last_simple_name(tb, te));
                if (!at("|")) break;
                ++pos_;
              }
              declare(expect_ident());
              expect(")");
              c.children.push_back(parse_block());
            }));
      }
      if (at("finally")) {
        st.children.push_back(
            make_statement(StatementKind::Finally, [&](Statement& f) {
              ++pos_;
              f.children.push_back(parse_block());
            }));
      }
    });
  }

  Statement parse_local_class() {
    return make_statement(StatementKind::LocalClass, [&](Statement& st) {
      while (!at("{")) {
        if (pos_ >= t_.size()) fail("local class without body");
        if (at("(")) pos_ = skip_balanced(pos_, "(", ")");
        else ++pos_;
      }
      // Local enums are skipped wholesale; classes, interfaces and records
      // have their members parsed.
      bool is_enum = false;
      for (std::size_t i = pos_; i-- > 0;) {
        if (is(i, "enum")) is_enum = true;
        if (is(i, "class") || is(i, "interface") || is(i, "enum") ||
            (ident_at(i) && t_[i].lexeme == "record")) {
          break;
        }
      }
      if (is_enum) {
        pos_ = skip_balanced(pos_, "{", "}");
        return;
      }
      parse_class_body(st);
    });
  }

  // Members of an anonymous or local class body, starting at `{`.
  void parse_class_body(Statement& owner) {
    expect("{");
    while (!at("}")) {
      if (pos_ >= t_.size()) fail("unterminated class body");
      if (at(";")) {
        ++pos_;
        continue;
      }
      while (true) {
        if (at("@") && !at("interface", 1)) {
          pos_ = skip_annotation_at(pos_);
        } else if (pos_ < t_.size() && t_[pos_].kind == TokenKind::Keyword &&
                   kMemberModifiers.contains(t_[pos_].lexeme) && !at("{", 1)) {
          ++pos_;
        } else {
          break;
        }
      }
      if (at("{")) {
        owner.children.push_back(parse_block());
        continue;
      }
      if (local_class_ahead()) {
        while (!at("{")) ++pos_;
        pos_ = skip_balanced(pos_, "{", "}");
        continue;
      }
      // Method / constructor if an identifier is followed by '(' before any
      // '=' or ';'.
      std::size_t i = pos_;
      if (at("<")) {
        if (auto e = scan_type_args(i)) i = *e;
      }
      std::optional<std::size_t> paren;
      int angle = 0;
      for (std::size_t j = i; j < t_.size(); ++j) {
        if (is(j, "<")) ++angle;
        else if (is(j, ">")) --angle;
        else if (is(j, ">>")) angle -= 2;
        else if (is(j, ">>>")) angle -= 3;
        else if (angle <= 0 && (is(j, "=") || is(j, ";"))) break;
        else if (angle <= 0 && is(j, "(") && ident_at(j - 1)) {
          paren = j;
          break;
        }
      }
      if (paren) {
        const std::size_t close = skip_balanced(*paren, "(", ")");
        for (std::size_t j = *paren + 1; j + 1 < close; ++j) {
          if (ident_at(j) && (is(j + 1, ",") || j + 1 == close - 1)) {
            declared_.insert(t_[j].lexeme);
          }
        }
        pos_ = close;
        while (at("[") && at("]", 1)) pos_ += 2;
        if (at("throws")) {
          while (!at("{") && !at(";")) {
            if (pos_ >= t_.size()) fail("unterminated method");
            ++pos_;
          }
        }
        if (at(";")) {
          ++pos_;
        } else {
          owner.children.push_back(parse_block());
        }
      } else {
        owner.children.push_back(
            make_statement(StatementKind::LocalVariable, [&](Statement&) {
              parse_local_variables();
              expect(";");
            }));
      }
    }
    ++pos_;
  }

  // ---- expressions ---------------------------------------------------------

  void parse_expr() { parse_assignment(); }

  void parse_assignment() {
    parse_ternary();
    if (pos_ < t_.size() && t_[pos_].kind == TokenKind::Operator &&
        kAssignmentOps.contains(t_[pos_].lexeme)) {
      ++pos_;
      parse_assignment();
    }
  }

  void parse_ternary() {
    parse_binary(1);
    if (at("?")) {
      ++pos_;
      parse_assignment();
      expect(":");
      parse_assignment();
    }
  }

  void parse_binary(int min_prec) {
    parse_unary();
    while (pos_ < t_.size()) {
      const int prec = binary_precedence(t_[pos_]);
      if (prec == 0 || prec < min_prec) break;
      if (at("instanceof")) {
        ++pos_;
        parse_instanceof_target();
        continue;
      }
      ++pos_;
      ++binary_ops_;
      parse_binary(prec + 1);
    }
  }

  void parse_instanceof_target() {
    if (at("final")) ++pos_;
    consume_type();
    if (at("(")) {
      pos_ = skip_balanced(pos_, "(", ")");
    } else if (at_ident() && !is_operator_word(pos_)) {
      declare(t_[pos_++].lexeme);
    }
  }

  bool is_operator_word(std::size_t i) const {
    return ident_at(i) && t_[i].lexeme == "when" && no_lambda_;
  }

  bool lambda_ahead() const {
    if (at_ident()) return at("->", 1) && !no_lambda_;
    if (!at("(")) return false;
    const std::size_t close = skip_balanced(pos_, "(", ")");
    return is(close, "->");
  }

  bool cast_ahead() const {
    if (!at("(")) return false;
    const std::size_t close = skip_balanced(pos_, "(", ")");
    if (is(close, "->")) return false;
    if (primitive_at(pos_ + 1)) {
      const auto e = scan_type(pos_ + 1);
      return e && *e == close - 1;
    }
    auto e = scan_type(pos_ + 1);
    while (e && is(*e, "&")) e = scan_type(*e + 1);
    if (!e || *e != close - 1) return false;
    if (close >= t_.size()) return false;
    const Token& n = t_[close];
    if (n.is_literal() || n.kind == TokenKind::Identifier) return true;
    return is(close, "(") || is(close, "!") || is(close, "~") ||
           is(close, "this") || is(close, "super") || is(close, "new") ||
           is(close, "switch") || primitive_at(close);
  }

  void parse_unary() {
    if (at("++") || at("--") || at("+") || at("-") || at("!") || at("~")) {
      ++pos_;
      parse_unary();
      return;
    }
    if (cast_ahead()) {
      ++pos_;
      const std::size_t begin = pos_;
      consume_type();
      while (at("&")) {
        ++pos_;
        consume_type();
      }
      s_.casts.push_back(join(begin, pos_));
      expect(")");
      parse_unary();
      return;
    }
    parse_postfix();
  }

  enum class PrimaryKind { Other, ThisOrSuper, Name };
  struct Primary {
    PrimaryKind kind = PrimaryKind::Other;
    std::string name;
  };

  // A simple name used as a value: a variable unless it is an undeclared,
  // capitalized qualifier (then it names a class).
  void resolve_name(Primary& p, bool qualifier) {
    if (p.kind != PrimaryKind::Name) return;
    if (!declared_.contains(p.name) && qualifier && !p.name.empty() &&
        std::isupper(static_cast<unsigned char>(p.name.front()))) {
      s_.referenced_classes.push_back(p.name);
    } else {
      s_.referenced_variables.push_back(p.name);
    }
    p.kind = PrimaryKind::Other;
  }

  void parse_postfix() {
    Primary p = parse_primary();
    while (pos_ < t_.size()) {
      if (at(".")) {
        const bool local = p.kind == PrimaryKind::ThisOrSuper;
        ++pos_;
        if (at("<")) {
          const auto e = scan_type_args(pos_);
          if (!e) fail("malformed type arguments");
          pos_ = *e;
        }
        if (at_ident() && at("(", 1)) {
          resolve_name(p, true);
          CallSite call;
          call.name = t_[pos_].lexeme;
          call.position = pos_;
          call.receiver = local ? ReceiverCategory::Local : ReceiverCategory::External;
          ++pos_;
          call.argument_count = parse_arguments();
          s_.call_sites.push_back(std::move(call));
          p = Primary{};
        } else if (at_ident()) {
          resolve_name(p, true);
          s_.field_accesses.push_back(FieldAccess{t_[pos_].lexeme, pos_});
          ++pos_;
          p = Primary{};
        } else if (at("class")) {
          if (p.kind == PrimaryKind::Name) s_.referenced_classes.push_back(p.name);
          ++pos_;
          p = Primary{};
        } else if (at("this") || at("super")) {
          if (p.kind == PrimaryKind::Name) s_.referenced_classes.push_back(p.name);
          ++pos_;
          p = Primary{PrimaryKind::ThisOrSuper, {}};
        } else if (at("new")) {
          resolve_name(p, true);
          parse_creator();
          p = Primary{};
        } else {
          fail("unexpected token after '.'");
        }
      } else if (at("[")) {
        if (at("]", 1)) {  // Type[].class / Type[]::new
          if (p.kind == PrimaryKind::Name) {
            s_.referenced_classes.push_back(p.name);
            p = Primary{};
          }
          while (at("[") && at("]", 1)) pos_ += 2;
          continue;
        }
        resolve_name(p, false);
        const std::size_t bracket = pos_;
        ++pos_;
        const std::size_t before = binary_ops_;
        parse_expr();
        expect("]");
        s_.array_accesses.push_back(ArrayAccess{
            binary_ops_ > before ? ArrayAccessKind::BinaryIndex
                                 : ArrayAccessKind::SimpleIndex,
            bracket});
      } else if (at("::")) {
        resolve_name(p, true);
        ++pos_;
        if (at("<")) {
          if (auto e = scan_type_args(pos_)) pos_ = *e;
        }
        if (at_ident() || at("new")) ++pos_;
        else fail("malformed method reference");
      } else if (at("++") || at("--")) {
        resolve_name(p, false);
        ++pos_;
      } else {
        break;
      }
    }
    resolve_name(p, false);
  }

  Primary parse_primary() {
    if (pos_ >= t_.size()) fail("unexpected end of expression");
    const Token& t = t_[pos_];
    if (t.is_literal()) {
      ++pos_;
      return {};
    }
    if (at("this") || at("super")) {
      ++pos_;
      if (at("(")) {  // explicit constructor invocation
        parse_arguments();
        return {};
      }
      return {PrimaryKind::ThisOrSuper, {}};
    }
    if (lambda_ahead()) {
      parse_lambda();
      return {};
    }
    if (at("(")) {
      ++pos_;
      parse_expr();
      expect(")");
      return {};
    }
    if (at_ident()) {
      if (at("(", 1)) {
        CallSite call;
        call.name = t.lexeme;
        call.position = pos_;
        call.receiver = ReceiverCategory::Local;
        ++pos_;
        call.argument_count = parse_arguments();
        s_.call_sites.push_back(std::move(call));
        return {};
      }
      ++pos_;
      return {PrimaryKind::Name, t.lexeme};
    }
    if (at("new")) {
      parse_creator();
      return {};
    }
    if (at("switch")) {
      nested_->push_back(parse_switch());
      return {};
    }
    if (primitive_at(pos_) || at("void")) {
      const auto e = scan_type(pos_);
      pos_ = *e;
      return {};
    }
    if (at("{")) {
      parse_array_initializer();
      return {};
    }
    if (at("@")) {
      pos_ = skip_annotation_at(pos_);
      return parse_primary();
    }
    fail("unexpected token in expression");
  }

  std::size_t parse_arguments() {
    expect("(");
    std::size_t count = 0;
    if (!at(")")) {
      while (true) {
        parse_expr();
        ++count;
        if (!at(",")) break;
        ++pos_;
      }
    }
    expect(")");
    return count;
  }

  void parse_lambda() {
    if (at("(")) {
      ++pos_;
      while (!at(")")) {
        pos_ = skip_variable_modifiers_at(pos_);
        if (const auto e = scan_type(pos_); e && (ident_at(*e) || is(*e, "..."))) {
          consume_type();
          if (at("...")) ++pos_;
        }
        declare(expect_ident());
        if (!at(",")) break;
        ++pos_;
      }
      expect(")");
    } else {
      declare(expect_ident());
    }
    expect("->");
    if (at("{")) {
      Statement body = parse_block();
      nested_->push_back(std::move(body));
    } else {
      parse_expr();
    }
  }

  void parse_creator() {
    expect("new");
    if (at("<")) {
      const auto e = scan_type_args(pos_);
      if (!e) fail("malformed type arguments");
      pos_ = *e;
    }
    consume_type();
    if (at("[")) {
      while (at("[")) {
        ++pos_;
        if (at("]")) {
          ++pos_;
        } else {
          parse_expr();
          expect("]");
        }
      }
    }
    if (at("{")) {
      parse_array_initializer();
      return;
    }
    if (at("(")) {
      parse_arguments();
      if (at("{")) {
        Statement body = make_statement(StatementKind::ClassBody,
                                        [&](Statement& st) { parse_class_body(st); });
        nested_->push_back(std::move(body));
      }
      return;
    }
    if (is(pos_ - 1, "]")) return;
    fail("malformed instance creation");
  }

  void parse_array_initializer() {
    expect("{");
    while (!at("}")) {
      if (at("{")) parse_array_initializer();
      else parse_expr();
      if (!at(",")) break;
      ++pos_;
    }
    expect("}");
  }

  // ---- Halstead classification --------------------------------------------

  void classify_range(std::size_t begin, std::size_t end,
                      std::vector<std::string>& operators,
                      std::vector<std::string>& operands,
                      LiteralCounts* literals) const {
    for (std::size_t i = begin; i < end && i < t_.size(); ++i) {
      const Token& t = t_[i];
      switch (t.kind) {
        case TokenKind::Operator:
          operators.push_back(t.lexeme);
          break;
        case TokenKind::Keyword:
          if (kControlKeywords.contains(t.lexeme)) {
            operators.push_back(t.lexeme);
          } else if (t.lexeme == "this" || t.lexeme == "super") {
            operands.push_back(t.lexeme);
          }
          break;
        case TokenKind::Identifier:
          if (contextual_keywords_.contains(i)) operators.push_back(t.lexeme);
          else operands.push_back(t.lexeme);
          break;
        case TokenKind::IntegerLiteral:
        case TokenKind::FloatLiteral:
          operands.push_back(t.lexeme);
          if (literals) ++literals->numeric;
          break;
        case TokenKind::CharLiteral:
          operands.push_back(t.lexeme);
          if (literals) ++literals->character;
          break;
        case TokenKind::StringLiteral:
          operands.push_back(t.lexeme);
          if (literals) ++literals->string;
          break;
        case TokenKind::BooleanLiteral:
          operands.push_back(t.lexeme);
          if (literals) ++literals->boolean;
          break;
        case TokenKind::NullLiteral:
          operands.push_back(t.lexeme);
          if (literals) ++literals->null;
          break;
        default:
          break;
      }
    }
  }

  std::vector<Token> t_;
  std::size_t pos_ = 0;
  MethodSummary s_;
  std::set<std::string> declared_;
  std::set<std::size_t> contextual_keywords_;
  std::size_t binary_ops_ = 0;
  bool no_lambda_ = false;
  std::vector<std::size_t>* roots_ = nullptr;
  std::vector<Statement>* nested_ = nullptr;
};

}  // namespace

MethodSummary parse_method_text(std::string_view declaration) {
  return Parser(lex_significant(declaration)).run();
}

MethodSummary parse_method(const MethodRecord& method) {
  return parse_method_text(method.text);
}

}  // namespace clonevet::java

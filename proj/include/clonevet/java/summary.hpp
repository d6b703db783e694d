#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "clonevet/java/source.hpp"

namespace clonevet::java {

enum class StatementKind {
  LocalVariable,
  Expression,
  If,
  For,
  ForEach,
  While,
  Do,
  Switch,
  SwitchCase,  // one label group; structural
  Try,
  Catch,       // structural
  Finally,     // structural
  Return,
  Throw,
  Break,
  Continue,
  Block,       // structural
  ClassBody,   // anonymous class members; structural
  Labeled,
  Synchronized,
  Assert,
  Yield,
  LocalClass,
  Empty,       // structural
};

const char* to_string(StatementKind kind) noexcept;

/// Statement kinds counted as statements by the metrics (everything except
/// braces, case groups, catch/finally clauses, class bodies and `;`).
bool is_counted(StatementKind kind) noexcept;

struct Statement {
  StatementKind kind = StatementKind::Block;
  /// Indices into MethodSummary::expressions of the root expressions owned
  /// directly by this statement.
  std::vector<std::size_t> expressions;
  /// Nested statements, including bodies of lambdas and anonymous classes
  /// that appear inside this statement's expressions.
  std::vector<Statement> children;
  /// Non-default case labels (SwitchCase only).
  std::size_t case_labels = 0;

  bool operator==(const Statement&) const = default;
};

/// A root expression: its token range and Halstead classification.
struct ExpressionInfo {
  std::size_t first_token = 0;  // inclusive, index into declaration tokens
  std::size_t last_token = 0;   // exclusive
  std::vector<std::string> operators;
  std::vector<std::string> operands;

  bool operator==(const ExpressionInfo&) const = default;
};

enum class ReceiverCategory { Local, External };

struct CallSite {
  std::string name;
  std::size_t argument_count = 0;
  ReceiverCategory receiver = ReceiverCategory::Local;
  std::size_t position = 0;  // token index of the callee name

  bool operator==(const CallSite&) const = default;
};

struct FieldAccess {
  std::string name;
  std::size_t position = 0;

  bool operator==(const FieldAccess&) const = default;
};

enum class ArrayAccessKind { SimpleIndex, BinaryIndex };

struct ArrayAccess {
  ArrayAccessKind kind = ArrayAccessKind::SimpleIndex;
  std::size_t position = 0;  // token index of '['

  bool operator==(const ArrayAccess&) const = default;
};

struct Parameter {
  std::string type;
  std::string name;

  bool operator==(const Parameter&) const = default;
};

struct LiteralCounts {
  int boolean = 0;
  int character = 0;
  int string = 0;
  int numeric = 0;
  int null = 0;

  bool operator==(const LiteralCounts&) const = default;
};

/// Everything the metrics and Action-token extraction need from one method.
/// Positions are indices into the method's significant-token stream, so the
/// summary is independent of layout and comments.
struct MethodSummary {
  std::string name;
  std::vector<Parameter> parameters;
  std::vector<Statement> statements;  // top-level statements of the body
  std::vector<ExpressionInfo> expressions;
  std::vector<CallSite> call_sites;
  std::vector<FieldAccess> field_accesses;
  std::vector<ArrayAccess> array_accesses;
  std::vector<std::string> declared_variables;
  std::vector<std::string> referenced_variables;  // occurrences
  std::vector<std::string> referenced_classes;    // occurrences
  std::vector<std::string> thrown_exception_types;
  std::vector<std::string> referenced_exception_types;
  std::vector<std::string> casts;
  /// Halstead classification of the body tokens, in order.
  std::vector<std::string> operators;
  std::vector<std::string> operands;
  LiteralCounts literals;

  bool operator==(const MethodSummary&) const = default;
};

/// Parses one method or constructor declaration. Throws LexError or
/// Error(ParseError).
MethodSummary parse_method(const MethodRecord& method);
MethodSummary parse_method_text(std::string_view declaration);

}  // namespace clonevet::java

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>

#include "clonevet/action_tokens.hpp"
#include "clonevet/java/source.hpp"
#include "clonevet/java/summary.hpp"
#include "clonevet/metrics.hpp"
#include "clonevet/pair_key.hpp"

namespace clonevet {

/// Everything the resolution stages need from one method, computed once.
/// Failures are captured rather than thrown so that a pair with an
/// unlexable or unparseable side still terminates (as Manual).
struct AnalyzedMethod {
  java::MethodRecord record;
  MethodLocation location;

  /// SHA-256 of the comment-free, whitespace-free text; empty if unlexable.
  std::string type1_digest;
  std::optional<java::MethodSummary> summary;
  metrics::MetricsVector metrics;
  action::ActionTokenSequence actions;
  /// Language tokens with identifiers blinded and literals reduced to their
  /// kind, as a multiset.
  std::map<std::string, int> normalized_tokens;
  int normalized_token_total = 0;

  std::string lex_error;
  std::string parse_error;

  bool lexed() const noexcept { return lex_error.empty(); }
  bool parsed() const noexcept { return lexed() && parse_error.empty(); }

  static AnalyzedMethod analyze(java::MethodRecord record);
  static std::shared_ptr<const AnalyzedMethod> make_shared(java::MethodRecord record);
};

MethodLocation location_of(const java::MethodRecord& record);

/// Token-multiset overlap of the normalized language tokens, relative to the
/// larger method. Used to place auto-resolved Type III pairs in VST3 / ST3.
Rational syntactic_similarity(const AnalyzedMethod& a, const AnalyzedMethod& b);

}  // namespace clonevet

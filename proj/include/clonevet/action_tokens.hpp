#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "clonevet/java/summary.hpp"
#include "clonevet/rational.hpp"

namespace clonevet::action {

inline constexpr std::string_view kArrayAccess = "ArrayAccess";
inline constexpr std::string_view kArrayAccessBinary = "ArrayAccessBinary";

/// Action tokens of a method: the ordered list plus its frequency histogram.
class ActionTokenSequence {
 public:
  ActionTokenSequence() = default;
  explicit ActionTokenSequence(std::vector<std::string> ordered);

  /// Builds a sequence from a histogram; `ordered` lists tokens by name.
  static ActionTokenSequence from_bag(const std::map<std::string, int>& bag);

  const std::vector<std::string>& ordered() const noexcept { return ordered_; }
  const std::map<std::string, int>& bag() const noexcept { return bag_; }
  int total() const noexcept { return static_cast<int>(ordered_.size()); }
  bool empty() const noexcept { return ordered_.empty(); }

  bool operator==(const ActionTokenSequence& o) const noexcept {
    return ordered_ == o.ordered_;
  }

 private:
  std::vector<std::string> ordered_;
  std::map<std::string, int> bag_;
};

/// One token per call site (callee simple name), field access (field name)
/// and array access (ArrayAccess / ArrayAccessBinary), in source order.
ActionTokenSequence extract_action_tokens(const java::MethodSummary& summary);

/// Σ_t min(freq1(t), freq2(t)) / max(total1, total2); 0 when both are empty.
Rational overlap_similarity(const ActionTokenSequence& a,
                            const ActionTokenSequence& b);

/// overlap_similarity(a, b) ≥ threshold; two empty sequences never pass.
/// Throws Error(InvalidThreshold) when
/// the threshold lies outside [0, 1].
bool passes_action_filter(const ActionTokenSequence& a,
                          const ActionTokenSequence& b,
                          const Rational& threshold);

}  // namespace clonevet::action

#include "clonevet/action_tokens.hpp"

#include <algorithm>
#include <utility>

#include "clonevet/error.hpp"

namespace clonevet::action {

ActionTokenSequence::ActionTokenSequence(std::vector<std::string> ordered)
    : ordered_(std::move(ordered)) {
  for (const std::string& t : ordered_) ++bag_[t];
}

ActionTokenSequence ActionTokenSequence::from_bag(
    const std::map<std::string, int>& bag) {
  std::vector<std::string> ordered;
  for (const auto& [token, freq] : bag) {
    for (int i = 0; i < freq; ++i) ordered.push_back(token);
  }
  return ActionTokenSequence(std::move(ordered));
}

ActionTokenSequence extract_action_tokens(const java::MethodSummary& s) {
  std::vector<std::pair<std::size_t, std::string>> positioned;
  positioned.reserve(s.call_sites.size() + s.field_accesses.size() +
                     s.array_accesses.size());
  for (const java::CallSite& c : s.call_sites) positioned.emplace_back(c.position, c.name);
  for (const java::FieldAccess& f : s.field_accesses) positioned.emplace_back(f.position, f.name);
  for (const java::ArrayAccess& a : s.array_accesses) {
    positioned.emplace_back(a.position,
                            std::string(a.kind == java::ArrayAccessKind::BinaryIndex
                                            ? kArrayAccessBinary
                                            : kArrayAccess));
  }
  std::stable_sort(positioned.begin(), positioned.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<std::string> ordered;
  ordered.reserve(positioned.size());
  for (auto& [pos, name] : positioned) ordered.push_back(std::move(name));
  return ActionTokenSequence(std::move(ordered));
}

Rational overlap_similarity(const ActionTokenSequence& a,
                            const ActionTokenSequence& b) {
  const int denom = std::max(a.total(), b.total());
  if (denom == 0) return Rational(0);
  const auto& small = a.bag().size() <= b.bag().size() ? a.bag() : b.bag();
  const auto& large = a.bag().size() <= b.bag().size() ? b.bag() : a.bag();
  std::int64_t shared = 0;
  for (const auto& [token, freq] : small) {
    if (auto it = large.find(token); it != large.end()) {
      shared += std::min(freq, it->second);
    }
  }
  return Rational(shared, denom);
}

bool passes_action_filter(const ActionTokenSequence& a,
                          const ActionTokenSequence& b,
                          const Rational& threshold) {
  if (!in_unit_interval(threshold)) {
    throw Error(ErrorCode::InvalidThreshold,
                "action filter threshold " + threshold.to_string() +
                    " outside [0,1]");
  }
  if (a.empty() && b.empty()) return false;
  return overlap_similarity(a, b) >= threshold;
}

}  // namespace clonevet::action

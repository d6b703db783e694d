#include "clonevet/classifier/features.hpp"

#include <algorithm>

#include "clonevet/error.hpp"

namespace clonevet::classifier {

FeatureVector featurize(const AnalyzedMethod& a, const AnalyzedMethod& b) {
  for (const AnalyzedMethod* m : {&a, &b}) {
    if (!m->parsed()) {
      throw Error(ErrorCode::ParseError,
                  "cannot featurize unparsed method " + m->location.folder + "/" +
                      m->location.file + ":" + std::to_string(m->location.start_line) +
                      (m->lex_error.empty() ? ": " + m->parse_error : ": " + m->lex_error));
    }
  }
  const auto va = a.metrics.values();
  const auto vb = b.metrics.values();
  bool swap = b.location < a.location;
  if (a.location == b.location) swap = vb < va;
  const auto& left = swap ? vb : va;
  const auto& right = swap ? va : vb;
  FeatureVector out{};
  std::copy(left.begin(), left.end(), out.begin());
  std::copy(right.begin(), right.end(), out.begin() + metrics::kMetricCount);
  return out;
}

std::vector<std::string> feature_names() {
  std::vector<std::string> out;
  for (const char* suffix : {"_1", "_2"}) {
    for (std::string_view n : metrics::kMetricNames) out.push_back(std::string(n) + suffix);
  }
  return out;
}

}  // namespace clonevet::classifier

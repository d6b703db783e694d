#pragma once

#include <array>
#include <string>
#include <vector>

#include "clonevet/analysis.hpp"
#include "clonevet/metrics.hpp"

namespace clonevet::classifier {

inline constexpr std::size_t kFeatureCount = 2 * metrics::kMetricCount;

/// Metrics of the canonical left method followed by those of the right one.
using FeatureVector = std::array<double, kFeatureCount>;

/// Canonical order: the method with the smaller location is on the left
/// (metric values break ties), so featurize(a, b) == featurize(b, a).
/// Throws Error(ParseError) if either method failed to parse.
FeatureVector featurize(const AnalyzedMethod& a, const AnalyzedMethod& b);

/// "XMET_1" ... "NNULLTRL_1", "XMET_2" ... "NNULLTRL_2".
std::vector<std::string> feature_names();

/// Pluggable Type III model.
class Classifier {
 public:
  virtual ~Classifier() = default;
  /// Probability in [0, 1] that the pair is a true clone.
  virtual double predict(const FeatureVector& features) const = 0;
};

}  // namespace clonevet::classifier

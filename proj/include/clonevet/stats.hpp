#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clonevet/pair_key.hpp"
#include "clonevet/pipeline.hpp"
#include "clonevet/rational.hpp"

namespace clonevet::stats {

/// Two-sided standard-normal quantile for `confidence` in (0, 1).
double z_value(double confidence);

/// Cochran's minimum sample size with p = 0.5, corrected for a finite
/// population when one is given and capped at it. Throws
/// Error(InvalidParameter) for confidence or margin outside (0, 1) or a
/// population below 1.
std::int64_t required_sample_size(const Rational& confidence, const Rational& margin,
                                  std::optional<std::int64_t> population = std::nullopt);

struct SamplePlan {
  Rational confidence{95, 100};
  Rational margin{5, 100};
  std::optional<std::int64_t> population;
  std::int64_t required_n = 0;
  /// Configured oversample target; the drawn size is max(required_n, target)
  /// capped at the population.
  std::int64_t sample_target = 400;
  std::uint64_t seed = 0;
  std::int64_t drawn = 0;
  std::int64_t shortfall = 0;
};

/// Fills required_n for the plan's confidence, margin and population.
SamplePlan plan_sample(Rational confidence, Rational margin, std::optional<std::int64_t> population,
                       std::int64_t sample_target, std::uint64_t seed);

struct SampleDraw {
  std::vector<PairKey> keys;  // drawn pairs, in PairKey order
  std::size_t requested = 0;
  std::size_t shortfall = 0;  // requested - available when short
};

/// Uniform sample without replacement of `n` distinct keys. Keys are sorted
/// before drawing so the result depends only on the key set and the seed.
/// Asking for more than exist returns them all and reports the shortfall.
SampleDraw draw_sample(std::vector<PairKey> keys, std::size_t n, std::uint64_t seed);

enum class Verdict { TP, FP };
const char* to_string(Verdict v) noexcept;

/// TP iff strictly more than half the votes say clone. Throws Error(NoVotes).
Verdict aggregate_votes(const std::vector<bool>& votes);

struct PairOutcome {
  PairKey key;
  pipeline::ResolutionOutcome resolution;
  std::vector<bool> votes;
  Verdict verdict = Verdict::TP;
};

struct PrecisionReport {
  std::size_t sample_size = 0;
  std::size_t auto_t1 = 0;
  std::size_t auto_t2 = 0;
  std::size_t auto_t3 = 0;
  std::size_t known = 0;  // KnownTrue + KnownFalse
  std::size_t known_false = 0;
  std::size_t manual_count = 0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  Rational precision;
  Rational effort_reduction;
  std::optional<SamplePlan> plan;
  std::vector<PairOutcome> pairs;

  std::string to_json() const;
  std::string to_table() const;
};

/// Auto-resolved and KnownTrue pairs are true positives, KnownFalse pairs
/// false positives, and manual pairs take their majority verdict. Throws
/// Error(IncompleteExperiment) naming every manual pair without votes, and
/// Error(InvalidParameter) for an empty sample or mismatched lengths.
PrecisionReport compute_precision_report(const std::vector<PairKey>& keys,
                                         const std::vector<pipeline::ResolutionOutcome>& resolutions,
                                         const std::map<PairKey, std::vector<bool>>& votes);

}  // namespace clonevet::stats

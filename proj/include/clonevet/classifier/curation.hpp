#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "clonevet/classifier/features.hpp"
#include "clonevet/classifier/model.hpp"
#include "clonevet/corpus.hpp"
#include "clonevet/pair_key.hpp"
#include "clonevet/rational.hpp"

namespace clonevet::classifier {

enum class RowProvenance { IntersectionPositive, MinedNegative, Manual };

const char* to_string(RowProvenance p) noexcept;
std::optional<RowProvenance> parse_row_provenance(std::string_view text);

struct TrainingRow {
  PairKey key;
  FeatureVector features{};
  bool clone = false;
  RowProvenance provenance = RowProvenance::Manual;
};

/// Counts for each step of the curation, in the order they happen.
struct CurationStats {
  std::vector<std::size_t> tool_pairs;     // distinct pairs per tool
  std::size_t intersection = 0;            // pairs reported by every tool
  std::size_t unresolved = 0;              // intersection pairs not found in the corpus
  std::size_t positives = 0;               // after removing T1/T2 and filtering
  std::size_t negatives_at_filter = 0;     // corpus pairs passing the filter, not T1/T2
  std::size_t union_pairs = 0;             // distinct pairs across the union tools
  std::size_t negatives_after_union = 0;   // minus union pairs and positives
  std::size_t negatives_sampled = 0;       // after balancing
  std::size_t positives_sampled = 0;       // after balancing
  std::size_t total_rows = 0;
};

struct TrainingSet {
  std::vector<TrainingRow> rows;
  CurationStats stats;

  std::size_t count(bool clone) const;
  std::vector<LabeledRow> labeled() const;
};

struct CurationConfig {
  Rational theta{9, 10};
  /// Methods smaller than this never enter a mined pair.
  int min_tokens = 1;
  std::uint64_t seed = 0;
};

/// Assumed positives: pairs every tool reports, minus Type I/II, that pass
/// the Action Filter. Assumed negatives: corpus pairs passing the filter
/// that are not Type I/II, not reported by any union tool and not positive.
/// The larger class is down-sampled (seeded) to the size of the smaller.
/// Throws Error(EmptyIntersection) with fewer than two tools or when no pair
/// survives to become a positive.
TrainingSet curate_training_set(const std::vector<std::vector<PairKey>>& tool_outputs,
                                const std::vector<std::vector<PairKey>>& union_outputs,
                                const Corpus& corpus, const CurationConfig& cfg = {});

/// Columnar CSV: the eight key columns, the 48 features, label
/// (clone / non_clone) and provenance, under a header line.
std::string training_set_to_text(const TrainingSet& set);
TrainingSet training_set_from_text(std::string_view text);
void save_training_set(const TrainingSet& set, const std::filesystem::path& path);
TrainingSet load_training_set(const std::filesystem::path& path);

/// The statistics table as aligned text.
std::string curation_stats_table(const CurationStats& stats);

}  // namespace clonevet::classifier

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clonevet/classifier/features.hpp"
#include "clonevet/corpus.hpp"
#include "clonevet/csv.hpp"
#include "clonevet/knowledge.hpp"
#include "clonevet/pipeline.hpp"
#include "clonevet/stats.hpp"

namespace clonevet::study {

struct StudyConfig {
  pipeline::PipelineConfig pipeline;
  Rational confidence{95, 100};
  Rational margin{5, 100};
  std::int64_t sample_target = 400;
  std::uint64_t seed = 0;
  int jobs = 1;

  void validate() const;
};

struct PreparedPairs {
  /// Distinct pairs that passed the size filter, in PairKey order.
  std::vector<pipeline::CandidatePair> pairs;
  std::size_t uploaded = 0;        // rows in the upload
  std::size_t duplicates = 0;      // rows repeating an earlier PairKey
  std::size_t below_min_tokens = 0;
  std::size_t unlocated = 0;       // pairs with a side not found in the corpus
  std::vector<std::string> diagnostics;
};

/// Resolves every row against the corpus and applies the size filter. A
/// side that cannot be located keeps its pair (it will end up Manual with
/// the lookup error as reason) because its size cannot be measured.
PreparedPairs prepare_pairs(const std::vector<csv::UploadRow>& rows, const Corpus& corpus,
                            int min_tokens);

struct StudyRun {
  stats::SamplePlan plan;
  std::vector<pipeline::CandidatePair> sample;  // in PairKey order, resolution set
};

/// Plans the sample over the prepared population, draws it and resolves
/// every drawn pair.
StudyRun sample_and_resolve(const PreparedPairs& prepared, const knowledge::KnowledgeView* kb,
                            const classifier::Classifier* model, const StudyConfig& cfg);

/// Report for a run given human votes for its manual pairs.
stats::PrecisionReport report_for(const StudyRun& run,
                                  const std::map<PairKey, std::vector<bool>>& votes);

/// Offline verdict file: eight key columns and a verdict that is either
/// true/false or a ';'-separated list of votes ("true;true;false"). Rows
/// repeating a pair add their votes to it.
/// Throws Error(MalformedCSV).
std::map<PairKey, std::vector<bool>> parse_labels(std::string_view text);

/// Outcome listing as CSV (stable columns) or aligned text.
std::string outcomes_csv(const std::vector<pipeline::CandidatePair>& pairs);
std::string outcomes_table(const std::vector<pipeline::CandidatePair>& pairs);

}  // namespace clonevet::study

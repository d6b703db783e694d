#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "clonevet/analysis.hpp"
#include "clonevet/classifier/features.hpp"
#include "clonevet/knowledge.hpp"
#include "clonevet/pair_key.hpp"
#include "clonevet/rational.hpp"

namespace clonevet::pipeline {

struct PipelineConfig {
  int min_tokens = 50;
  Rational theta_t3{9, 10};
  double classifier_cutoff = 0.5;
  Rational trust_similarity_floor{7, 10};

  /// Throws Error(InvalidThreshold) / Error(InvalidParameter).
  void validate() const;
};

/// Syntactic similarity at or above which an auto-resolved Type III pair is
/// labeled VST3 rather than ST3.
inline const Rational kVst3Floor{9, 10};

enum class ResolutionStatus { KnownTrue, KnownFalse, AutoType1, AutoType2, AutoType3, Manual };
enum class Provenance { KnowledgeBase, Algorithm, Classifier, Human };

const char* to_string(ResolutionStatus status) noexcept;
const char* to_string(Provenance provenance) noexcept;
std::optional<ResolutionStatus> parse_status(std::string_view text);
std::optional<Provenance> parse_provenance(std::string_view text);
bool is_auto(ResolutionStatus status) noexcept;

struct ResolutionOutcome {
  ResolutionStatus status = ResolutionStatus::Manual;
  std::optional<CloneType> clone_type;
  Provenance provenance = Provenance::Human;
  /// Why the pair went to a human, or which stage decided it.
  std::string reason;
  std::optional<Rational> action_similarity;
  std::optional<double> probability;

  bool operator==(const ResolutionOutcome&) const = default;
};

struct CandidatePair {
  std::shared_ptr<const AnalyzedMethod> left;
  std::shared_ptr<const AnalyzedMethod> right;
  PairKey key;
  std::optional<ResolutionOutcome> resolution;

  CandidatePair() = default;
  CandidatePair(std::shared_ptr<const AnalyzedMethod> l, std::shared_ptr<const AnalyzedMethod> r);
  CandidatePair swapped() const;
};

/// Both methods have at least `min_tokens` language tokens.
bool passes_size_filter(const CandidatePair& pair, int min_tokens);

/// Equal digests of the comment- and whitespace-free text. Unlexable input
/// is never a match; `reason` (if given) says why.
bool resolve_type1(const AnalyzedMethod& a, const AnalyzedMethod& b, std::string* reason = nullptr);

/// Identical ordered Action token sequences and identical metrics.
bool resolve_type2(const AnalyzedMethod& a, const AnalyzedMethod& b, std::string* reason = nullptr);

struct Type3Decision {
  bool auto_true = false;
  CloneType subcategory = CloneType::ST3;
  Rational action_similarity;
  std::optional<double> probability;
  std::string reason;
};

/// Action Filter at cfg.theta_t3, then the classifier at cfg.classifier_cutoff.
/// A null model or a model that throws leaves the pair undecided.
Type3Decision resolve_type3(const CandidatePair& pair, const classifier::Classifier* model,
                            const PipelineConfig& cfg);

/// Knowledge base, Type I, Type II, Type III, else Manual. Never throws for
/// bad pairs; failures become Manual with a reason.
ResolutionOutcome resolve_pair(const CandidatePair& pair, const knowledge::KnowledgeView* kb,
                               const classifier::Classifier* model, const PipelineConfig& cfg);

/// resolve_pair over every pair, in parallel when jobs > 1. Output order
/// matches input order.
std::vector<ResolutionOutcome> resolve_all(const std::vector<CandidatePair>& pairs,
                                           const knowledge::KnowledgeView* kb,
                                           const classifier::Classifier* model,
                                           const PipelineConfig& cfg, int jobs = 1);

}  // namespace clonevet::pipeline

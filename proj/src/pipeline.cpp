#include "clonevet/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "clonevet/action_tokens.hpp"
#include "clonevet/error.hpp"

namespace clonevet::pipeline {

void PipelineConfig::validate() const {
  if (min_tokens < 1) throw Error(ErrorCode::InvalidParameter, "min_tokens must be at least 1");
  if (!in_unit_interval(theta_t3)) {
    throw Error(ErrorCode::InvalidThreshold, "theta_t3 outside [0,1]: " + theta_t3.to_string());
  }
  if (!in_unit_interval(trust_similarity_floor)) {
    throw Error(ErrorCode::InvalidThreshold,
                "trust_similarity_floor outside [0,1]: " + trust_similarity_floor.to_string());
  }
  if (!(classifier_cutoff >= 0.0 && classifier_cutoff <= 1.0)) {
    throw Error(ErrorCode::InvalidThreshold, "classifier_cutoff outside [0,1]");
  }
}

const char* to_string(ResolutionStatus status) noexcept {
  switch (status) {
    case ResolutionStatus::KnownTrue: return "KnownTrue";
    case ResolutionStatus::KnownFalse: return "KnownFalse";
    case ResolutionStatus::AutoType1: return "AutoType1";
    case ResolutionStatus::AutoType2: return "AutoType2";
    case ResolutionStatus::AutoType3: return "AutoType3";
    case ResolutionStatus::Manual: return "Manual";
  }
  return "?";
}

const char* to_string(Provenance provenance) noexcept {
  switch (provenance) {
    case Provenance::KnowledgeBase: return "knowledge_base";
    case Provenance::Algorithm: return "algorithm";
    case Provenance::Classifier: return "classifier";
    case Provenance::Human: return "human";
  }
  return "?";
}

std::optional<ResolutionStatus> parse_status(std::string_view text) {
  for (auto s : {ResolutionStatus::KnownTrue, ResolutionStatus::KnownFalse,
                 ResolutionStatus::AutoType1, ResolutionStatus::AutoType2,
                 ResolutionStatus::AutoType3, ResolutionStatus::Manual}) {
    if (text == to_string(s)) return s;
  }
  return std::nullopt;
}

std::optional<Provenance> parse_provenance(std::string_view text) {
  for (auto p : {Provenance::KnowledgeBase, Provenance::Algorithm, Provenance::Classifier,
                 Provenance::Human}) {
    if (text == to_string(p)) return p;
  }
  return std::nullopt;
}

bool is_auto(ResolutionStatus status) noexcept { return status != ResolutionStatus::Manual; }

CandidatePair::CandidatePair(std::shared_ptr<const AnalyzedMethod> l,
                             std::shared_ptr<const AnalyzedMethod> r)
    : left(std::move(l)), right(std::move(r)), key(left->location, right->location) {}

CandidatePair CandidatePair::swapped() const {
  CandidatePair p(right, left);
  p.resolution = resolution;
  return p;
}

bool passes_size_filter(const CandidatePair& pair, int min_tokens) {
  return pair.left->record.language_token_count >= min_tokens &&
         pair.right->record.language_token_count >= min_tokens;
}

namespace {

void set(std::string* out, std::string value) {
  if (out) *out = std::move(value);
}

std::string failure_of(const AnalyzedMethod& m) {
  const std::string where = m.location.folder + "/" + m.location.file + ":" +
                            std::to_string(m.location.start_line);
  if (!m.lexed()) return "lex error in " + where + ": " + m.lex_error;
  return "parse error in " + where + ": " + m.parse_error;
}

}  // namespace

bool resolve_type1(const AnalyzedMethod& a, const AnalyzedMethod& b, std::string* reason) {
  for (const AnalyzedMethod* m : {&a, &b}) {
    if (!m->lexed()) {
      set(reason, failure_of(*m));
      return false;
    }
  }
  return a.type1_digest == b.type1_digest;
}

bool resolve_type2(const AnalyzedMethod& a, const AnalyzedMethod& b, std::string* reason) {
  for (const AnalyzedMethod* m : {&a, &b}) {
    if (!m->parsed()) {
      set(reason, failure_of(*m));
      return false;
    }
  }
  return a.actions.ordered() == b.actions.ordered() && metrics::metrics_equal(a.metrics, b.metrics);
}

Type3Decision resolve_type3(const CandidatePair& pair, const classifier::Classifier* model,
                            const PipelineConfig& cfg) {
  Type3Decision d;
  const AnalyzedMethod& a = *pair.left;
  const AnalyzedMethod& b = *pair.right;
  if (!a.parsed() || !b.parsed()) {
    d.reason = failure_of(a.parsed() ? b : a);
    return d;
  }
  d.action_similarity = action::overlap_similarity(a.actions, b.actions);
  if (!action::passes_action_filter(a.actions, b.actions, cfg.theta_t3)) {
    d.reason = "action similarity " + d.action_similarity.to_string() + " below " +
               cfg.theta_t3.to_string();
    return d;
  }
  if (model == nullptr) {
    d.reason = "no classifier model";
    return d;
  }
  double p = 0;
  try {
    p = model->predict(classifier::featurize(a, b));
  } catch (const std::exception& e) {
    d.reason = std::string("classifier unavailable: ") + e.what();
    return d;
  }
  if (!std::isfinite(p)) {
    d.reason = "classifier returned a non-finite probability";
    return d;
  }
  d.probability = p;
  if (p < cfg.classifier_cutoff) {
    d.reason = "classifier probability below cutoff";
    return d;
  }
  d.auto_true = true;
  d.subcategory = syntactic_similarity(a, b) >= kVst3Floor ? CloneType::VST3 : CloneType::ST3;
  return d;
}

ResolutionOutcome resolve_pair(const CandidatePair& pair, const knowledge::KnowledgeView* kb,
                               const classifier::Classifier* model, const PipelineConfig& cfg) {
  ResolutionOutcome out;
  if (kb != nullptr) {
    if (auto label = kb->lookup(pair.key); label && label->trusted_at(cfg.trust_similarity_floor)) {
      out.provenance = Provenance::KnowledgeBase;
      out.clone_type = label->clone_type;
      out.reason = std::string("knowledge base (") + knowledge::to_string(label->source) + ")";
      if (label->label == knowledge::Label::TrueClone) {
        out.status = ResolutionStatus::KnownTrue;
      } else {
        out.status = ResolutionStatus::KnownFalse;
        out.clone_type.reset();
      }
      return out;
    }
  }
  if (!pair.left || !pair.right) {
    out.reason = "method not available";
    return out;
  }
  std::string why;
  if (resolve_type1(*pair.left, *pair.right, &why)) {
    out.status = ResolutionStatus::AutoType1;
    out.clone_type = CloneType::T1;
    out.provenance = Provenance::Algorithm;
    out.reason = "identical after removing comments and layout";
    return out;
  }
  if (!why.empty()) {
    out.reason = why;
    return out;
  }
  if (resolve_type2(*pair.left, *pair.right, &why)) {
    out.status = ResolutionStatus::AutoType2;
    out.clone_type = CloneType::T2;
    out.provenance = Provenance::Algorithm;
    out.reason = "identical action tokens and metrics";
    return out;
  }
  if (!why.empty()) {
    out.reason = why;
    return out;
  }
  Type3Decision t3 = resolve_type3(pair, model, cfg);
  out.action_similarity = t3.action_similarity;
  out.probability = t3.probability;
  if (t3.auto_true) {
    out.status = ResolutionStatus::AutoType3;
    out.clone_type = t3.subcategory;
    out.provenance = Provenance::Classifier;
    out.reason = "action filter and classifier";
    return out;
  }
  out.reason = t3.reason;
  return out;
}

std::vector<ResolutionOutcome> resolve_all(const std::vector<CandidatePair>& pairs,
                                           const knowledge::KnowledgeView* kb,
                                           const classifier::Classifier* model,
                                           const PipelineConfig& cfg, int jobs) {
  std::vector<ResolutionOutcome> out(pairs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < pairs.size();) {
      out[i] = resolve_pair(pairs[i], kb, model, cfg);
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(pairs.size())));
  std::vector<std::thread> threads;
  for (int t = 1; t < n; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  return out;
}

}  // namespace clonevet::pipeline

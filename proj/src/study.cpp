#include "clonevet/study.hpp"

#include <algorithm>
#include <set>

#include "clonevet/error.hpp"

namespace clonevet::study {

void StudyConfig::validate() const {
  pipeline.validate();
  if (sample_target < 1) throw Error(ErrorCode::InvalidParameter, "sample target must be positive");
  if (jobs < 1) throw Error(ErrorCode::InvalidParameter, "jobs must be positive");
  // Validates confidence and margin.
  stats::required_sample_size(confidence, margin);
}

namespace {

std::shared_ptr<const AnalyzedMethod> placeholder(const MethodLocation& where,
                                                  const std::string& why) {
  auto a = std::make_shared<AnalyzedMethod>();
  a->location = where;
  a->lex_error = why;
  return a;
}

}  // namespace

PreparedPairs prepare_pairs(const std::vector<csv::UploadRow>& rows, const Corpus& corpus,
                            int min_tokens) {
  PreparedPairs out;
  out.uploaded = rows.size();
  std::set<PairKey> seen;
  for (const csv::UploadRow& row : rows) {
    if (!seen.insert(row.key()).second) {
      ++out.duplicates;
      continue;
    }
    bool located = true;
    auto side = [&](const MethodLocation& where) {
      try {
        return corpus.locate_analyzed(where);
      } catch (const Error& e) {
        located = false;
        out.diagnostics.push_back("line " + std::to_string(row.line) + ": " + e.what());
        return placeholder(where, e.what());
      }
    };
    pipeline::CandidatePair pair(side(row.left), side(row.right));
    // Keep the spans as the tool reported them; they identify the pair in
    // the knowledge base, the labels file and the report.
    pair.key = row.key();
    if (!located) {
      ++out.unlocated;
    } else if (!pipeline::passes_size_filter(pair, min_tokens)) {
      ++out.below_min_tokens;
      continue;
    }
    out.pairs.push_back(std::move(pair));
  }
  std::sort(out.pairs.begin(), out.pairs.end(),
            [](const auto& a, const auto& b) { return a.key < b.key; });
  return out;
}

StudyRun sample_and_resolve(const PreparedPairs& prepared, const knowledge::KnowledgeView* kb,
                            const classifier::Classifier* model, const StudyConfig& cfg) {
  cfg.validate();
  if (prepared.pairs.empty()) {
    throw Error(ErrorCode::EmptyAfterFilter, "no pair left after the size filter");
  }
  StudyRun run;
  run.plan = stats::plan_sample(cfg.confidence, cfg.margin,
                                static_cast<std::int64_t>(prepared.pairs.size()),
                                cfg.sample_target, cfg.seed);
  std::vector<PairKey> keys;
  for (const auto& p : prepared.pairs) keys.push_back(p.key);
  const stats::SampleDraw draw =
      stats::draw_sample(keys, static_cast<std::size_t>(run.plan.drawn), cfg.seed);
  run.plan.shortfall = static_cast<std::int64_t>(draw.shortfall);
  std::size_t j = 0;
  for (const PairKey& k : draw.keys) {
    while (prepared.pairs[j].key != k) ++j;
    run.sample.push_back(prepared.pairs[j]);
  }
  const auto outcomes = pipeline::resolve_all(run.sample, kb, model, cfg.pipeline, cfg.jobs);
  for (std::size_t i = 0; i < outcomes.size(); ++i) run.sample[i].resolution = outcomes[i];
  return run;
}

stats::PrecisionReport report_for(const StudyRun& run,
                                  const std::map<PairKey, std::vector<bool>>& votes) {
  std::vector<PairKey> keys;
  std::vector<pipeline::ResolutionOutcome> outcomes;
  for (const auto& p : run.sample) {
    keys.push_back(p.key);
    outcomes.push_back(p.resolution.value_or(pipeline::ResolutionOutcome{}));
  }
  stats::PrecisionReport r = stats::compute_precision_report(keys, outcomes, votes);
  r.plan = run.plan;
  return r;
}

std::map<PairKey, std::vector<bool>> parse_labels(std::string_view text) {
  std::map<PairKey, std::vector<bool>> out;
  bool first = true;
  for (const csv::Row& row : csv::read_rows(text)) {
    if (first) {
      first = false;
      if (!row.fields.empty() && (row.fields[0] == "folder_name_1" || row.fields[0] == "folder_1")) {
        continue;
      }
    }
    if (row.fields.size() != 9) {
      throw Error(ErrorCode::MalformedCSV, "line " + std::to_string(row.line) +
                                               ": expected 9 columns, found " +
                                               std::to_string(row.fields.size()));
    }
    auto [a, b] = csv::parse_pair_columns(row);
    std::vector<bool> votes;
    std::string_view v = row.fields[8];
    while (!v.empty()) {
      const auto semi = v.find(';');
      std::string_view tok = v.substr(0, semi);
      while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
      while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
      if (tok == "true" || tok == "1" || tok == "TP") votes.push_back(true);
      else if (tok == "false" || tok == "0" || tok == "FP") votes.push_back(false);
      else {
        throw Error(ErrorCode::MalformedCSV, "line " + std::to_string(row.line) +
                                                 ": bad verdict '" + std::string(tok) + "'");
      }
      if (semi == std::string_view::npos) break;
      v.remove_prefix(semi + 1);
    }
    if (votes.empty()) {
      throw Error(ErrorCode::MalformedCSV, "line " + std::to_string(row.line) + ": empty verdict");
    }
    auto& ledger = out[PairKey(std::move(a), std::move(b))];
    ledger.insert(ledger.end(), votes.begin(), votes.end());
  }
  return out;
}

std::string outcomes_csv(const std::vector<pipeline::CandidatePair>& pairs) {
  std::string out =
      "folder_name_1,file_name_1,start_line_1,end_line_1,"
      "folder_name_2,file_name_2,start_line_2,end_line_2,"
      "status,clone_type,provenance,action_similarity,probability,reason\n";
  for (const auto& p : pairs) {
    const auto r = p.resolution.value_or(pipeline::ResolutionOutcome{});
    out += csv::pair_columns(p.key);
    out += ',';
    out += pipeline::to_string(r.status);
    out += ',';
    if (r.clone_type) out += to_string(*r.clone_type);
    out += ',';
    out += pipeline::to_string(r.provenance);
    out += ',';
    if (r.action_similarity) out += r.action_similarity->to_string();
    out += ',';
    if (r.probability) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6f", *r.probability);
      out += buf;
    }
    out += ',';
    out += csv::escape_field(r.reason);
    out += '\n';
  }
  return out;
}

std::string outcomes_table(const std::vector<pipeline::CandidatePair>& pairs) {
  std::vector<std::array<std::string, 4>> rows;
  rows.push_back({"pair", "status", "type", "provenance"});
  for (const auto& p : pairs) {
    const auto r = p.resolution.value_or(pipeline::ResolutionOutcome{});
    auto side = [](const MethodLocation& m) {
      return m.folder + "/" + m.file + ":" + std::to_string(m.start_line) + "-" +
             std::to_string(m.end_line);
    };
    rows.push_back({side(p.key.first()) + " ~ " + side(p.key.second()), pipeline::to_string(r.status),
                    r.clone_type ? to_string(*r.clone_type) : "-", pipeline::to_string(r.provenance)});
  }
  std::array<std::size_t, 4> w{};
  for (const auto& r : rows)
    for (std::size_t i = 0; i < 4; ++i) w[i] = std::max(w[i], r[i].size());
  std::string out;
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < 4; ++i) {
      out += r[i];
      if (i + 1 < 4) out += std::string(w[i] - r[i].size() + 2, ' ');
    }
    out += '\n';
  }
  return out;
}

}  // namespace clonevet::study

#include "clonevet/classifier/curation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "clonevet/action_tokens.hpp"
#include "clonevet/csv.hpp"
#include "clonevet/error.hpp"
#include "clonevet/pipeline.hpp"
#include "clonevet/random.hpp"

namespace clonevet::classifier {

const char* to_string(RowProvenance p) noexcept {
  switch (p) {
    case RowProvenance::IntersectionPositive: return "intersection_positive";
    case RowProvenance::MinedNegative: return "mined_negative";
    case RowProvenance::Manual: return "manual";
  }
  return "?";
}

std::optional<RowProvenance> parse_row_provenance(std::string_view text) {
  for (auto p : {RowProvenance::IntersectionPositive, RowProvenance::MinedNegative,
                 RowProvenance::Manual}) {
    if (text == to_string(p)) return p;
  }
  return std::nullopt;
}

std::size_t TrainingSet::count(bool clone) const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [&](const TrainingRow& r) { return r.clone == clone; }));
}

std::vector<LabeledRow> TrainingSet::labeled() const {
  std::vector<LabeledRow> out;
  out.reserve(rows.size());
  for (const TrainingRow& r : rows) out.push_back({r.features, r.clone});
  return out;
}

namespace {

bool is_type1_or_2(const AnalyzedMethod& a, const AnalyzedMethod& b) {
  return pipeline::resolve_type1(a, b) || pipeline::resolve_type2(a, b);
}

}  // namespace

TrainingSet curate_training_set(const std::vector<std::vector<PairKey>>& tool_outputs,
                                const std::vector<std::vector<PairKey>>& union_outputs,
                                const Corpus& corpus, const CurationConfig& cfg) {
  if (!in_unit_interval(cfg.theta)) {
    throw Error(ErrorCode::InvalidThreshold, "theta outside [0,1]: " + cfg.theta.to_string());
  }
  if (tool_outputs.size() < 2) {
    throw Error(ErrorCode::EmptyIntersection,
                "curation needs the outputs of at least two tools to intersect");
  }
  TrainingSet set;
  CurationStats& st = set.stats;

  // Reported spans are mapped to the spans of the methods they match, so the
  // tools agree on a pair even when their spans differ by a line, and mined
  // pairs (keyed by extracted spans) can be compared against them.
  std::map<PairKey, std::optional<PairKey>> located;
  auto locate = [&](const PairKey& key) -> std::optional<PairKey> {
    auto [it, fresh] = located.try_emplace(key);
    if (fresh) {
      try {
        it->second = PairKey(location_of(corpus.locate_method(key.first())),
                             location_of(corpus.locate_method(key.second())));
      } catch (const Error&) {
        it->second = std::nullopt;
      }
    }
    return it->second;
  };
  auto normalize = [&](const std::vector<PairKey>& list) {
    std::set<PairKey> out;
    for (const PairKey& k : list) out.insert(locate(k).value_or(k));
    return out;
  };

  std::set<PairKey> inter = normalize(tool_outputs[0]);
  for (const auto& list : tool_outputs) {
    std::set<PairKey> s = normalize(list);
    st.tool_pairs.push_back(s.size());
    std::set<PairKey> next;
    std::set_intersection(inter.begin(), inter.end(), s.begin(), s.end(),
                          std::inserter(next, next.end()));
    inter = std::move(next);
  }
  st.intersection = inter.size();
  if (inter.empty()) throw Error(ErrorCode::EmptyIntersection, "the tools share no pairs");

  std::vector<TrainingRow> positives;
  std::set<PairKey> positive_keys;
  for (const PairKey& key : inter) {
    std::shared_ptr<const AnalyzedMethod> a, b;
    try {
      a = corpus.locate_analyzed(key.first());
      b = corpus.locate_analyzed(key.second());
    } catch (const Error&) {
      ++st.unresolved;
      continue;
    }
    if (!a->parsed() || !b->parsed()) {
      ++st.unresolved;
      continue;
    }
    if (is_type1_or_2(*a, *b)) continue;
    if (!action::passes_action_filter(a->actions, b->actions, cfg.theta)) continue;
    positives.push_back({key, featurize(*a, *b), true, RowProvenance::IntersectionPositive});
    positive_keys.insert(key);
  }
  st.positives = positives.size();
  if (positives.empty()) {
    throw Error(ErrorCode::EmptyIntersection,
                "no intersection pair survives Type I/II removal and the Action Filter");
  }

  std::set<PairKey> union_keys;
  for (const auto& list : union_outputs) {
    const std::set<PairKey> s = normalize(list);
    union_keys.insert(s.begin(), s.end());
  }
  st.union_pairs = union_keys.size();

  // Candidate negatives. Two methods can only reach a positive threshold if
  // they share an Action token, so an inverted index over tokens bounds the
  // enumeration; at theta = 0 every pair qualifies.
  std::vector<std::shared_ptr<const AnalyzedMethod>> methods;
  for (const java::MethodRecord* m : corpus.all_methods()) {
    if (m->language_token_count < cfg.min_tokens) continue;
    auto a = corpus.analyzed(*m);
    if (a->parsed()) methods.push_back(std::move(a));
  }
  std::set<std::pair<std::size_t, std::size_t>> candidates;
  if (cfg.theta == Rational(0)) {
    for (std::size_t i = 0; i < methods.size(); ++i)
      for (std::size_t j = i + 1; j < methods.size(); ++j) candidates.insert({i, j});
  } else {
    std::map<std::string, std::vector<std::size_t>> index;
    for (std::size_t i = 0; i < methods.size(); ++i) {
      for (const auto& [tok, freq] : methods[i]->actions.bag()) index[tok].push_back(i);
    }
    for (const auto& [tok, ids] : index) {
      for (std::size_t x = 0; x < ids.size(); ++x)
        for (std::size_t y = x + 1; y < ids.size(); ++y) candidates.insert({ids[x], ids[y]});
    }
  }
  std::vector<TrainingRow> negatives;
  for (const auto& [i, j] : candidates) {
    const AnalyzedMethod& a = *methods[i];
    const AnalyzedMethod& b = *methods[j];
    if (!action::passes_action_filter(a.actions, b.actions, cfg.theta)) continue;
    if (is_type1_or_2(a, b)) continue;
    ++st.negatives_at_filter;
    PairKey key(a.location, b.location);
    if (union_keys.count(key) || positive_keys.count(key)) continue;
    negatives.push_back({key, featurize(a, b), false, RowProvenance::MinedNegative});
  }
  std::sort(negatives.begin(), negatives.end(),
            [](const TrainingRow& x, const TrainingRow& y) { return x.key < y.key; });
  st.negatives_after_union = negatives.size();

  Rng rng(cfg.seed);
  const std::size_t k = std::min(positives.size(), negatives.size());
  rng.sample_prefix(negatives, k);
  rng.sample_prefix(positives, k);
  auto by_key = [](const TrainingRow& x, const TrainingRow& y) { return x.key < y.key; };
  std::sort(positives.begin(), positives.end(), by_key);
  std::sort(negatives.begin(), negatives.end(), by_key);
  st.positives_sampled = positives.size();
  st.negatives_sampled = negatives.size();

  set.rows = std::move(positives);
  set.rows.insert(set.rows.end(), negatives.begin(), negatives.end());
  st.total_rows = set.rows.size();
  return set;
}

// ---------------------------------------------------------------------------
// Training-set file

namespace {

std::string header() {
  std::string h = "folder_1,file_1,start_1,end_1,folder_2,file_2,start_2,end_2";
  for (const std::string& n : feature_names()) h += "," + n;
  return h + ",label,provenance";
}

}  // namespace

std::string training_set_to_text(const TrainingSet& set) {
  std::string out = header() + "\n";
  char buf[40];
  for (const TrainingRow& r : set.rows) {
    out += csv::pair_columns(r.key);
    for (double x : r.features) {
      std::snprintf(buf, sizeof buf, ",%.17g", x);
      out += buf;
    }
    out += r.clone ? ",clone," : ",non_clone,";
    out += to_string(r.provenance);
    out += '\n';
  }
  return out;
}

TrainingSet training_set_from_text(std::string_view text) {
  TrainingSet set;
  const std::size_t width = 8 + kFeatureCount + 2;
  bool first = true;
  for (const csv::Row& row : csv::read_rows(text)) {
    if (first) {
      first = false;
      if (!row.fields.empty() && row.fields[0] == "folder_1") continue;
    }
    auto bad = [&](const std::string& why) {
      throw Error(ErrorCode::MalformedRow, "training set line " + std::to_string(row.line) + ": " + why);
    };
    if (row.fields.size() != width) {
      bad("expected " + std::to_string(width) + " columns, found " + std::to_string(row.fields.size()));
    }
    TrainingRow r;
    auto [a, b] = csv::parse_pair_columns(row);
    r.key = PairKey(std::move(a), std::move(b));
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      const std::string& f = row.fields[8 + j];
      char* end = nullptr;
      r.features[j] = std::strtod(f.c_str(), &end);
      if (f.empty() || end != f.c_str() + f.size()) bad("bad number '" + f + "'");
    }
    const std::string& label = row.fields[8 + kFeatureCount];
    if (label == "clone") r.clone = true;
    else if (label != "non_clone") bad("label must be clone or non_clone");
    auto prov = parse_row_provenance(row.fields[9 + kFeatureCount]);
    if (!prov) bad("unknown provenance");
    r.provenance = *prov;
    set.rows.push_back(std::move(r));
  }
  set.stats.total_rows = set.rows.size();
  return set;
}

void save_training_set(const TrainingSet& set, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::StorageError, "cannot write " + path.string());
  out << training_set_to_text(set);
}

TrainingSet load_training_set(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return training_set_from_text(ss.str());
}

std::string curation_stats_table(const CurationStats& s) {
  std::vector<std::pair<std::string, std::size_t>> rows;
  for (std::size_t i = 0; i < s.tool_pairs.size(); ++i) {
    rows.emplace_back("Tool " + std::to_string(i + 1) + " pairs", s.tool_pairs[i]);
  }
  rows.emplace_back("Intersection of all tools", s.intersection);
  rows.emplace_back("Intersection pairs not found in corpus", s.unresolved);
  rows.emplace_back("Intersection after removal (clone pairs)", s.positives);
  rows.emplace_back("Non-clone pairs at Action Filter", s.negatives_at_filter);
  rows.emplace_back("Union of pairs", s.union_pairs);
  rows.emplace_back("Non-clones after removing union pairs", s.negatives_after_union);
  rows.emplace_back("Non-clones after random sampling", s.negatives_sampled);
  rows.emplace_back("Total rows in final dataset", s.total_rows);
  std::size_t w = 0;
  for (const auto& r : rows) w = std::max(w, r.first.size());
  std::string out;
  int id = 1;
  for (const auto& [name, n] : rows) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%3d  ", id++);
    out += buf + name + std::string(w - name.size() + 2, ' ') + std::to_string(n) + "\n";
  }
  return out;
}

}  // namespace clonevet::classifier

#include "clonevet/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <boost/math/distributions/normal.hpp>
#include <json.hpp>

#include "clonevet/error.hpp"
#include "clonevet/random.hpp"

namespace clonevet::stats {

using nlohmann::json;

double z_value(double confidence) {
  if (!(confidence > 0 && confidence < 1)) {
    throw Error(ErrorCode::InvalidParameter, "confidence must lie in (0,1)");
  }
  boost::math::normal_distribution<double> n;
  return boost::math::quantile(n, 1.0 - (1.0 - confidence) / 2.0);
}

std::int64_t required_sample_size(const Rational& confidence, const Rational& margin,
                                  std::optional<std::int64_t> population) {
  const Rational zero(0), one(1);
  if (!(confidence > zero && confidence < one)) {
    throw Error(ErrorCode::InvalidParameter, "confidence must lie in (0,1): " + confidence.to_string());
  }
  if (!(margin > zero && margin < one)) {
    throw Error(ErrorCode::InvalidParameter, "margin must lie in (0,1): " + margin.to_string());
  }
  if (population && *population < 1) {
    throw Error(ErrorCode::InvalidParameter, "population must be at least 1");
  }
  const double z = z_value(confidence.to_double());
  const double m = margin.to_double();
  // The tolerance keeps values that are integral in exact arithmetic from
  // rounding up on floating-point noise.
  const double n0 = std::ceil(z * z * 0.25 / (m * m) - 1e-9);
  auto n = static_cast<std::int64_t>(n0);
  if (population) {
    const double N = static_cast<double>(*population);
    n = static_cast<std::int64_t>(std::ceil(n0 / (1.0 + (n0 - 1.0) / N) - 1e-9));
    n = std::min(n, *population);
  }
  return std::max<std::int64_t>(n, 1);
}

SamplePlan plan_sample(Rational confidence, Rational margin, std::optional<std::int64_t> population,
                       std::int64_t sample_target, std::uint64_t seed) {
  SamplePlan p;
  p.confidence = confidence;
  p.margin = margin;
  p.population = population;
  p.required_n = required_sample_size(confidence, margin, population);
  p.sample_target = sample_target;
  p.seed = seed;
  p.drawn = std::max(p.required_n, sample_target);
  if (population) p.drawn = std::min(p.drawn, *population);
  return p;
}

SampleDraw draw_sample(std::vector<PairKey> keys, std::size_t n, std::uint64_t seed) {
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  SampleDraw d;
  d.requested = n;
  if (n > keys.size()) d.shortfall = n - keys.size();
  Rng rng(seed);
  rng.sample_prefix(keys, n);
  std::sort(keys.begin(), keys.end());
  d.keys = std::move(keys);
  return d;
}

const char* to_string(Verdict v) noexcept { return v == Verdict::TP ? "TP" : "FP"; }

Verdict aggregate_votes(const std::vector<bool>& votes) {
  if (votes.empty()) throw Error(ErrorCode::NoVotes, "no votes to aggregate");
  const auto yes = static_cast<std::size_t>(std::count(votes.begin(), votes.end(), true));
  return 2 * yes > votes.size() ? Verdict::TP : Verdict::FP;
}

PrecisionReport compute_precision_report(const std::vector<PairKey>& keys,
                                         const std::vector<pipeline::ResolutionOutcome>& resolutions,
                                         const std::map<PairKey, std::vector<bool>>& votes) {
  using pipeline::ResolutionStatus;
  if (keys.size() != resolutions.size()) {
    throw Error(ErrorCode::InvalidParameter, "keys and resolutions differ in length");
  }
  if (keys.empty()) throw Error(ErrorCode::InvalidParameter, "empty sample");
  PrecisionReport r;
  r.sample_size = keys.size();
  std::vector<std::string> missing;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    PairOutcome o;
    o.key = keys[i];
    o.resolution = resolutions[i];
    switch (o.resolution.status) {
      case ResolutionStatus::AutoType1: ++r.auto_t1; break;
      case ResolutionStatus::AutoType2: ++r.auto_t2; break;
      case ResolutionStatus::AutoType3: ++r.auto_t3; break;
      case ResolutionStatus::KnownTrue: ++r.known; break;
      case ResolutionStatus::KnownFalse:
        ++r.known;
        ++r.known_false;
        o.verdict = Verdict::FP;
        break;
      case ResolutionStatus::Manual: {
        ++r.manual_count;
        auto it = votes.find(keys[i]);
        if (it == votes.end() || it->second.empty()) {
          missing.push_back(keys[i].to_string());
          continue;
        }
        o.votes = it->second;
        o.verdict = aggregate_votes(o.votes);
        break;
      }
    }
    (o.verdict == Verdict::TP ? r.tp : r.fp) += 1;
    r.pairs.push_back(std::move(o));
  }
  if (!missing.empty()) {
    std::string msg = std::to_string(missing.size()) + " manual pair(s) without votes:";
    for (const auto& m : missing) msg += "\n  " + m;
    throw Error(ErrorCode::IncompleteExperiment, msg);
  }
  const auto n = static_cast<std::int64_t>(r.sample_size);
  r.precision = Rational(static_cast<std::int64_t>(r.tp), n);
  r.effort_reduction = Rational(n - static_cast<std::int64_t>(r.manual_count), n);
  return r;
}

namespace {

json key_json(const PairKey& k) {
  auto side = [](const MethodLocation& m) {
    return json{{"folder", m.folder}, {"file", m.file}, {"start_line", m.start_line}, {"end_line", m.end_line}};
  };
  return json{side(k.first()), side(k.second())};
}

json rational_json(const Rational& r) {
  return json{{"exact", r.to_string()}, {"value", r.to_double()}};
}

std::string percent(const Rational& r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * r.to_double());
  return buf;
}

}  // namespace

std::string PrecisionReport::to_json() const {
  json doc;
  doc["sample_size"] = sample_size;
  doc["auto_counts"] = {{"T1", auto_t1}, {"T2", auto_t2}, {"T3", auto_t3}, {"known", known}};
  doc["known_false"] = known_false;
  doc["manual_count"] = manual_count;
  doc["tp"] = tp;
  doc["fp"] = fp;
  doc["precision"] = rational_json(precision);
  doc["effort_reduction"] = rational_json(effort_reduction);
  if (plan) {
    doc["sampling"] = {{"confidence", plan->confidence.to_string()},
                       {"margin", plan->margin.to_string()},
                       {"population", plan->population ? json(*plan->population) : json(nullptr)},
                       {"cochran_minimum", plan->required_n},
                       {"sample_target", plan->sample_target},
                       {"drawn", plan->drawn},
                       {"shortfall", plan->shortfall},
                       {"seed", plan->seed}};
  }
  json pj = json::array();
  for (const PairOutcome& p : pairs) {
    const auto& res = p.resolution;
    json o{{"key", key_json(p.key)},
           {"status", pipeline::to_string(res.status)},
           {"clone_type", res.clone_type ? json(to_string(*res.clone_type)) : json(nullptr)},
           {"provenance", pipeline::to_string(res.provenance)},
           {"reason", res.reason},
           {"verdict", to_string(p.verdict)}};
    if (res.action_similarity) o["action_similarity"] = res.action_similarity->to_string();
    if (res.probability) o["probability"] = *res.probability;
    if (!p.votes.empty()) o["votes"] = p.votes;
    pj.push_back(std::move(o));
  }
  doc["pairs"] = std::move(pj);
  return doc.dump(2) + "\n";
}

std::string PrecisionReport::to_table() const {
  std::string out;
  auto line = [&](const std::string& name, const std::string& value) {
    out += name;
    out += std::string(name.size() < 28 ? 28 - name.size() : 1, ' ');
    out += value + "\n";
  };
  if (plan) {
    line("Confidence / margin", plan->confidence.to_string() + " / " + plan->margin.to_string());
    line("Population", plan->population ? std::to_string(*plan->population) : "unbounded");
    line("Minimum sample (Cochran)", std::to_string(plan->required_n));
    line("Sample target", std::to_string(plan->sample_target));
    if (plan->shortfall > 0) line("Shortfall", std::to_string(plan->shortfall));
  }
  line("Number of samples", std::to_string(sample_size));
  line("Auto-resolved Type I", std::to_string(auto_t1));
  line("Auto-resolved Type II", std::to_string(auto_t2));
  line("Auto-resolved Type III", std::to_string(auto_t3));
  line("Known from knowledge base", std::to_string(known));
  line("Manually validated", std::to_string(manual_count));
  line("True positives", std::to_string(tp));
  line("False positives", std::to_string(fp));
  line("Precision", percent(precision) + " (" + precision.to_string() + ")");
  line("Effort reduction", percent(effort_reduction) + " (" + effort_reduction.to_string() + ")");
  return out;
}

}  // namespace clonevet::stats

#include <gtest/gtest.h>

#include <json.hpp>
#include <map>
#include <random>

#include "clonevet/error.hpp"
#include "clonevet/stats.hpp"
#include "oracles.hpp"

using namespace clonevet;
using namespace clonevet::stats;
using pipeline::ResolutionOutcome;
using pipeline::ResolutionStatus;

namespace {

PairKey key(int i) {
  return PairKey(MethodLocation{"f", "A.java", i, i + 1}, MethodLocation{"f", "B.java", i, i + 1});
}

ResolutionOutcome outcome(ResolutionStatus s) {
  ResolutionOutcome o;
  o.status = s;
  switch (s) {
    case ResolutionStatus::AutoType1: o.clone_type = CloneType::T1; o.provenance = pipeline::Provenance::Algorithm; break;
    case ResolutionStatus::AutoType2: o.clone_type = CloneType::T2; o.provenance = pipeline::Provenance::Algorithm; break;
    case ResolutionStatus::AutoType3: o.clone_type = CloneType::VST3; o.provenance = pipeline::Provenance::Classifier; break;
    case ResolutionStatus::KnownTrue:
    case ResolutionStatus::KnownFalse: o.provenance = pipeline::Provenance::KnowledgeBase; break;
    case ResolutionStatus::Manual: break;
  }
  return o;
}

}  // namespace

TEST(SampleSize, ZValues) {
  EXPECT_NEAR(z_value(0.95), 1.959964, 1e-6);
  EXPECT_NEAR(z_value(0.99), 2.575829, 1e-6);
  for (double c : {0.8, 0.9, 0.95, 0.975, 0.99, 0.999}) EXPECT_NEAR(z_value(c), testkit::oracle_z(c), 1e-9);
}

TEST(SampleSize, Examples) {
  EXPECT_EQ(required_sample_size(Rational(95, 100), Rational(5, 100)), 385);
  EXPECT_EQ(required_sample_size(Rational(99, 100), Rational(3, 100)), 1844);
  const auto fpc = required_sample_size(Rational(95, 100), Rational(5, 100), 100);
  EXPECT_LE(fpc, 100);
  EXPECT_GE(fpc, 80);
  EXPECT_EQ(fpc, 80);
  EXPECT_EQ(required_sample_size(Rational(95, 100), Rational(5, 100), 1), 1);
}

TEST(SampleSize, MatchesOracleOnGrid) {
  for (int c : {80, 90, 95, 99}) {
    for (int m : {1, 2, 3, 5, 10}) {
      const Rational conf(c, 100), margin(m, 100);
      EXPECT_EQ(required_sample_size(conf, margin), testkit::oracle_cochran(c / 100.0, m / 100.0));
      for (std::int64_t pop : {1, 2, 20, 100, 1000, 100000}) {
        const auto n = required_sample_size(conf, margin, pop);
        EXPECT_EQ(n, testkit::oracle_cochran(c / 100.0, m / 100.0, pop)) << c << " " << m << " " << pop;
        EXPECT_LE(n, pop);
      }
    }
  }
}

TEST(SampleSize, MonotoneInPopulation) {
  std::int64_t prev = 0;
  for (std::int64_t pop = 1; pop <= 5000; pop += 7) {
    const auto n = required_sample_size(Rational(95, 100), Rational(5, 100), pop);
    EXPECT_GE(n, prev);
    EXPECT_LE(n, 385);
    prev = n;
  }
}

TEST(SampleSize, InvalidParameters) {
  for (auto [c, m] : {std::pair{Rational(0), Rational(5, 100)}, std::pair{Rational(1), Rational(5, 100)},
                      std::pair{Rational(95, 100), Rational(0)}, std::pair{Rational(95, 100), Rational(1)}}) {
    try {
      required_sample_size(c, m);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidParameter);
    }
  }
  EXPECT_THROW(required_sample_size(Rational(95, 100), Rational(5, 100), 0), Error);
}

TEST(Plan, DrawnIsMaxOfRequiredAndTargetCappedAtPopulation) {
  auto p = plan_sample(Rational(95, 100), Rational(5, 100), 10000, 400, 1);
  EXPECT_EQ(p.required_n, 371);
  EXPECT_EQ(p.drawn, 400);
  p = plan_sample(Rational(99, 100), Rational(3, 100), std::nullopt, 400, 1);
  EXPECT_EQ(p.drawn, 1844);
  p = plan_sample(Rational(95, 100), Rational(5, 100), 20, 400, 1);
  EXPECT_EQ(p.drawn, 20);
  EXPECT_EQ(p.shortfall, 0);
}

TEST(Draw, FullSetAndDeterminism) {
  std::vector<PairKey> keys;
  for (int i = 0; i < 50; ++i) keys.push_back(key(i));
  auto all = draw_sample(keys, 50, 3);
  std::vector<PairKey> sorted = keys;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(all.keys, sorted);
  EXPECT_EQ(draw_sample(keys, 10, 9).keys, draw_sample(keys, 10, 9).keys);
  std::vector<PairKey> shuffled(keys.rbegin(), keys.rend());
  EXPECT_EQ(draw_sample(shuffled, 10, 9).keys, draw_sample(keys, 10, 9).keys);
  EXPECT_NE(draw_sample(keys, 10, 9).keys, draw_sample(keys, 10, 10).keys);
  const auto over = draw_sample(keys, 60, 1);
  EXPECT_EQ(over.keys.size(), 50u);
  EXPECT_EQ(over.shortfall, 10u);
  keys.push_back(key(0));
  EXPECT_EQ(draw_sample(keys, 60, 1).keys.size(), 50u);
}

TEST(Draw, UniformInclusion) {
  std::vector<PairKey> keys;
  for (int i = 0; i < 10; ++i) keys.push_back(key(i));
  const int trials = 20000;
  std::map<PairKey, int> hits;
  for (int s = 0; s < trials; ++s)
    for (const auto& k : draw_sample(keys, 3, static_cast<std::uint64_t>(s)).keys) ++hits[k];
  for (const auto& k : keys) EXPECT_NEAR(hits[k] / double(trials), 0.3, 0.02);
}

TEST(Votes, Examples) {
  EXPECT_EQ(aggregate_votes({true, true, false}), Verdict::TP);
  EXPECT_EQ(aggregate_votes({true, true, false, false}), Verdict::FP);
  EXPECT_EQ(aggregate_votes({true}), Verdict::TP);
  try {
    aggregate_votes({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoVotes);
  }
}

TEST(Votes, ExhaustiveAgainstOracle) {
  for (int len = 1; len <= 8; ++len) {
    for (int mask = 0; mask < (1 << len); ++mask) {
      std::vector<bool> v;
      for (int i = 0; i < len; ++i) v.push_back((mask >> i) & 1);
      const auto expected = testkit::oracle_majority(v).value_or(false) ? Verdict::TP : Verdict::FP;
      EXPECT_EQ(aggregate_votes(v), expected);
    }
  }
}

TEST(Report, PrecisionExample) {
  std::vector<PairKey> keys;
  std::vector<ResolutionOutcome> res;
  std::map<PairKey, std::vector<bool>> votes;
  for (int i = 0; i < 400; ++i) {
    keys.push_back(key(i));
    if (i < 390) {
      res.push_back(outcome(ResolutionStatus::AutoType1));
    } else {
      res.push_back(outcome(ResolutionStatus::Manual));
      votes[keys.back()] = {false};
    }
  }
  const auto r = compute_precision_report(keys, res, votes);
  EXPECT_EQ(r.precision, Rational(39, 40));
  EXPECT_EQ(r.precision.to_double(), 0.975);
  EXPECT_EQ(r.tp + r.fp, r.sample_size);
}

TEST(Report, EffortReduction) {
  std::vector<PairKey> keys;
  std::vector<ResolutionOutcome> res;
  std::map<PairKey, std::vector<bool>> votes;
  for (int i = 0; i < 400; ++i) {
    keys.push_back(key(i));
    if (i < 187) res.push_back(outcome(ResolutionStatus::AutoType1));
    else if (i < 197) res.push_back(outcome(ResolutionStatus::AutoType2));
    else {
      res.push_back(outcome(ResolutionStatus::Manual));
      votes[keys.back()] = {true, i % 2 == 0, false};
    }
  }
  const auto r = compute_precision_report(keys, res, votes);
  EXPECT_EQ(r.manual_count, 203u);
  EXPECT_EQ(r.auto_t1, 187u);
  EXPECT_EQ(r.auto_t2, 10u);
  EXPECT_EQ(r.effort_reduction, Rational(197, 400));
}

TEST(Report, AllAutomatic) {
  std::vector<PairKey> keys = {key(1), key(2), key(3), key(4)};
  std::vector<ResolutionOutcome> res = {outcome(ResolutionStatus::AutoType1), outcome(ResolutionStatus::AutoType2),
                                        outcome(ResolutionStatus::AutoType3), outcome(ResolutionStatus::KnownFalse)};
  const auto r = compute_precision_report(keys, res, {});
  EXPECT_EQ(r.manual_count, 0u);
  EXPECT_EQ(r.effort_reduction, Rational(1));
  EXPECT_EQ(r.known, 1u);
  EXPECT_EQ(r.known_false, 1u);
  EXPECT_EQ(r.fp, 1u);
  EXPECT_EQ(r.precision, Rational(3, 4));
  const auto j = nlohmann::json::parse(r.to_json());
  EXPECT_EQ(j["auto_counts"]["T1"], 1);
  EXPECT_EQ(j["auto_counts"]["T3"], 1);
  EXPECT_EQ(j["auto_counts"]["known"], 1);
  EXPECT_EQ(j["precision"]["exact"], "3/4");
  EXPECT_EQ(j["effort_reduction"]["exact"], "1");
  EXPECT_EQ(j["pairs"].size(), 4u);
  EXPECT_NE(r.to_table().find("3/4"), std::string::npos);
}

TEST(Report, MissingVotesAndBadInput) {
  std::vector<PairKey> keys = {key(1), key(2)};
  std::vector<ResolutionOutcome> res = {outcome(ResolutionStatus::Manual), outcome(ResolutionStatus::Manual)};
  try {
    compute_precision_report(keys, res, {{key(1), {true}}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IncompleteExperiment);
    EXPECT_NE(std::string(e.what()).find(key(2).to_string()), std::string::npos);
  }
  EXPECT_THROW(compute_precision_report({}, {}, {}), Error);
  EXPECT_THROW(compute_precision_report(keys, {outcome(ResolutionStatus::Manual)}, {}), Error);
}

TEST(Report, InvariantsOnRandomMixes) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    const int n = 1 + static_cast<int>(rng() % 40);
    std::vector<PairKey> keys;
    std::vector<ResolutionOutcome> res;
    std::map<PairKey, std::vector<bool>> votes;
    int manual = 0, expected_tp = 0;
    for (int i = 0; i < n; ++i) {
      keys.push_back(key(i));
      const auto s = static_cast<ResolutionStatus>(rng() % 6);
      res.push_back(outcome(s));
      if (s == ResolutionStatus::Manual) {
        ++manual;
        std::vector<bool> v(1 + rng() % 5);
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = rng() % 2;
        if (testkit::oracle_majority(v).value_or(false)) ++expected_tp;
        votes[keys.back()] = v;
      } else if (s != ResolutionStatus::KnownFalse) {
        ++expected_tp;
      }
    }
    const auto r = compute_precision_report(keys, res, votes);
    EXPECT_EQ(r.tp + r.fp, static_cast<std::size_t>(n));
    EXPECT_EQ(r.tp, static_cast<std::size_t>(expected_tp));
    EXPECT_EQ(r.precision, Rational(expected_tp, n));
    EXPECT_EQ(r.effort_reduction, Rational(n - manual, n));
  }
}

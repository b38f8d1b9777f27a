#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "alignforge/error.hpp"
#include "alignforge/metrics.hpp"
#include "alignforge/text.hpp"
#include "oracles/metric_oracles.hpp"
#include "support/synthetic.hpp"

using namespace alignforge;
using metrics::Metric;

namespace {

std::vector<metrics::TokenSeq> tokenized(const std::vector<std::string>& lines) {
  std::vector<metrics::TokenSeq> out;
  for (const auto& l : lines) out.push_back(text::split_whitespace(l));
  return out;
}

}  // namespace

TEST(Bleu, MatchesCountingOracleOnRandomCorpora) {
  for (std::uint64_t trial = 0; trial < 50; ++trial) {
    const auto s = synth::noisy_segments(20 + trial, 12, 12, 0.7, trial);
    const double got = metrics::bleu(tokenized(s.hyps), tokenized(s.refs)).score;
    std::vector<oracle::Units> h, r;
    for (std::size_t i = 0; i < s.hyps.size(); ++i) {
      h.push_back(oracle::split_spaces(s.hyps[i]));
      r.push_back(oracle::split_spaces(s.refs[i]));
    }
    EXPECT_NEAR(got, oracle::corpus_bleu(h, r), 1e-6) << trial;
    EXPECT_GT(got, 0.0);
  }
}

TEST(Bleu, IdenticalIsOneHundred) {
  const auto s = synth::noisy_segments(30, 10, 10, 1.0, 1);
  EXPECT_EQ(s.hyps, s.refs);
  EXPECT_DOUBLE_EQ(metrics::bleu(tokenized(s.refs), tokenized(s.refs)).score, 100.0);
}

TEST(Bleu, ClippedUnigramPrecision) {
  const metrics::TokenSeq hyp(7, "the");
  const metrics::TokenSeq ref{"the", "cat", "is", "on", "the", "mat"};
  const auto st = metrics::bleu_stats(hyp, ref, 4);
  EXPECT_EQ(st.matches[0], 2.0);
  EXPECT_EQ(st.totals[0], 7.0);
  EXPECT_EQ(metrics::bleu({hyp}, {ref}).score, 0.0);
  metrics::BleuConfig uni;
  uni.max_n = 1;
  EXPECT_DOUBLE_EQ(metrics::bleu({hyp}, {ref}, uni).score, 100.0 * 2.0 / 7.0);
}

TEST(Bleu, BrevityPenaltyAndSmoothing) {
  const metrics::TokenSeq ref{"a", "b", "c", "d", "e", "f"};
  const metrics::TokenSeq hyp{"a", "b", "c", "d"};
  EXPECT_NEAR(metrics::bleu({hyp}, {ref}).score, 100.0 * std::exp(1.0 - 6.0 / 4.0), 1e-12);
  metrics::BleuConfig smooth;
  smooth.smoothing = metrics::Smoothing::kAddK;
  const metrics::TokenSeq short_hyp{"a", "x"};
  // p1 = 1/2, p2..p4 = (0+1)/(1+1), (0+1)/(0+1), (0+1)/(0+1).
  const double expected = 100.0 * std::exp(1.0 - 6.0 / 2.0) * std::pow(0.5 * 0.5 * 1.0 * 1.0, 0.25);
  EXPECT_NEAR(metrics::bleu({short_hyp}, {ref}, smooth).score, expected, 1e-12);
  EXPECT_EQ(metrics::bleu({short_hyp}, {ref}).score, 0.0);
}

TEST(Bleu, ConfigEchoAndErrors) {
  const auto rep = metrics::bleu({{"a"}}, {{"a"}});
  EXPECT_EQ(rep.config["max_n"], 4);
  EXPECT_EQ(rep.config["smoothing"], "none");
  EXPECT_EQ(rep.segments.size(), 1u);
  const auto j = metrics::to_json(rep);
  EXPECT_TRUE(j.contains("comet"));
  EXPECT_TRUE(j["comet"].is_null());
  EXPECT_THROW(metrics::bleu({{"a"}}, {}), DataError);
  EXPECT_THROW(metrics::bleu({}, {}), DataError);
}

TEST(Chrf, MatchesCountingOracleOnRandomCorpora) {
  for (std::uint64_t trial = 0; trial < 50; ++trial) {
    const auto s = synth::noisy_segments(15 + trial, 12, 10, 0.6, 100 + trial);
    const auto rep = metrics::chrfpp(s.hyps, s.refs);
    EXPECT_NEAR(rep.score, oracle::corpus_chrfpp(s.hyps, s.refs), 1e-6) << trial;
    for (std::size_t i = 0; i < s.hyps.size(); ++i)
      EXPECT_NEAR(rep.segments[i], oracle::chrfpp_segment(s.hyps[i], s.refs[i]), 1e-6);
  }
}

TEST(Chrf, IdenticalAndDisjoint) {
  EXPECT_DOUBLE_EQ(metrics::chrfpp_segment("the small house", "the small house"), 100.0);
  EXPECT_DOUBLE_EQ(metrics::chrfpp_segment("abc", "xyz"), 0.0);
  EXPECT_DOUBLE_EQ(metrics::chrfpp_segment("", ""), 100.0);
  EXPECT_DOUBLE_EQ(metrics::chrfpp_segment("a", ""), 0.0);
  EXPECT_DOUBLE_EQ(metrics::chrfpp({"x y"}, {"x y"}).score, 100.0);
}

// Property: scores depend on the multiset of (hyp, ref) pairs, not their order.
TEST(Metrics, PermutationInvariant) {
  const auto s = synth::noisy_segments(40, 10, 10, 0.6, 7);
  std::vector<std::size_t> order(s.hyps.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(3);
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::string> h, r;
  for (auto i : order) {
    h.push_back(s.hyps[i]);
    r.push_back(s.refs[i]);
  }
  EXPECT_NEAR(metrics::bleu(tokenized(h), tokenized(r)).score, metrics::bleu(tokenized(s.hyps), tokenized(s.refs)).score,
              1e-9);
  EXPECT_NEAR(metrics::chrfpp(h, r).score, metrics::chrfpp(s.hyps, s.refs).score, 1e-9);
}

// Property: every score lies in [0, 100].
TEST(Metrics, ScoresAreBounded) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = synth::noisy_segments(10, 5, 8, 0.5, 500 + seed);
    for (double x : metrics::bleu(tokenized(s.hyps), tokenized(s.refs)).segments) {
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, 100.0);
    }
    for (double x : metrics::chrfpp(s.hyps, s.refs).segments) {
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, 100.0);
    }
  }
}

TEST(Metric, ParsesNames) {
  EXPECT_EQ(metrics::parse_metric("bleu"), Metric::kBleu);
  EXPECT_EQ(metrics::parse_metric("chrf++"), Metric::kChrfpp);
  EXPECT_EQ(metrics::parse_metric("chrfpp"), Metric::kChrfpp);
  EXPECT_THROW(metrics::parse_metric("ter"), UsageError);
}

TEST(Bootstrap, IdenticalSystemsGivePOne) {
  const auto s = synth::noisy_segments(50, 10, 10, 0.6, 11);
  for (auto m : {Metric::kBleu, Metric::kChrfpp}) {
    const auto r = metrics::paired_bootstrap(s.hyps, s.hyps, s.refs, m, 1000, 1);
    EXPECT_EQ(r.p_value, 1.0);
    EXPECT_EQ(r.delta, 0.0);
    EXPECT_EQ(r.winner, "none");
  }
}

TEST(Bootstrap, DominatedSystemGivesPZero) {
  const auto s = synth::noisy_segments(50, 10, 10, 0.6, 12);
  std::vector<std::string> junk(s.refs.size(), "zzz qqq");
  for (auto m : {Metric::kBleu, Metric::kChrfpp}) {
    const auto r = metrics::paired_bootstrap(s.refs, junk, s.refs, m, 1000, 2);
    EXPECT_EQ(r.p_value, 0.0);
    EXPECT_EQ(r.winner, "a");
    EXPECT_EQ(r.score_a, 100.0);
    const auto flipped = metrics::paired_bootstrap(junk, s.refs, s.refs, m, 1000, 2);
    EXPECT_EQ(flipped.winner, "b");
    EXPECT_LT(flipped.delta, 0.0);
  }
}

TEST(Bootstrap, DeterministicUnderSeed) {
  const auto a = synth::noisy_segments(40, 10, 10, 0.6, 13);
  const auto b = synth::noisy_segments(40, 10, 10, 0.6, 14);
  const auto r1 = metrics::paired_bootstrap(a.hyps, b.hyps, a.refs, Metric::kChrfpp, 500, 99);
  const auto r2 = metrics::paired_bootstrap(a.hyps, b.hyps, a.refs, Metric::kChrfpp, 500, 99);
  EXPECT_EQ(r1.p_value, r2.p_value);
  EXPECT_EQ(metrics::to_json(r1).dump(), metrics::to_json(r2).dump());
  EXPECT_GE(r1.p_value, 0.0);
  EXPECT_LE(r1.p_value, 1.0);
}

TEST(Bootstrap, RejectsBadInputs) {
  const std::vector<std::string> two{"a b", "c d"}, one{"a"};
  EXPECT_THROW(metrics::paired_bootstrap(two, two, two, Metric::kBleu, 99, 1), UsageError);
  EXPECT_THROW(metrics::paired_bootstrap(one, one, one, Metric::kBleu, 100, 1), DataError);
  EXPECT_THROW(metrics::paired_bootstrap(two, one, two, Metric::kBleu, 100, 1), DataError);
}

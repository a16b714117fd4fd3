#include "junta/testers.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace junta;

namespace {

TruthTable random_table(int n, std::uint64_t seed) {
  const CounterRng rng(Seed{seed}, Stream::kAux);
  return TruthTable::tabulate(n, [&](std::uint64_t x) { return rng.bit(x); });
}

// Pr over every size-ell J ⊆ {r+1..n} that some pair satisfies x = y^{⊕J}.
Rational brute_collision(const std::vector<std::uint64_t>& pts, int k, int r, int ell) {
  const int n = k + ell;
  std::uint64_t hits = 0, total = 0;
  for_each_k_subset(r + 1, n, ell, [&](const std::vector<int>& idx) {
    const std::uint64_t jm = VarSet(idx).mask();
    ++total;
    bool hit = false;
    for (std::size_t i = 0; i < pts.size() && !hit; ++i)
      for (std::size_t j = 0; j < pts.size() && !hit; ++j) hit = i != j && pts[i] == (pts[j] ^ jm);
    hits += hit;
  });
  return ratio(hits, total);
}

HardInstanceParams advantage_params(Rational p) {
  HardInstanceParams hp;
  hp.k = 8;
  hp.ell = 2;
  hp.r = 1;
  hp.p = p;
  hp.variant = Variant::Parity;
  return hp;
}

}  // namespace

TEST(QueryOracleTest, BudgetIsEnforcedBeforeAnswering) {
  const TruthTable f = random_table(4, 1);
  QueryOracle oracle(f, 2);
  EXPECT_EQ(oracle.query(3), f[3]);
  EXPECT_EQ(oracle.query(3), f[3]);  // repeat is free
  EXPECT_EQ(oracle.query(5), f[5]);
  EXPECT_EQ(oracle.queries_used(), 2U);
  EXPECT_THROW(oracle.query(6), BudgetExhausted);
  EXPECT_EQ(oracle.transcript().size(), 2U);
  EXPECT_EQ(oracle.query(5), f[5]);
  EXPECT_THROW(oracle.query(16), std::out_of_range);
}

TEST(QueryOracleTest, LazyTarget) {
  int calls = 0;
  QueryOracle oracle(30, [&](std::uint64_t x) {
    ++calls;
    return (x & 1U) != 0;
  });
  EXPECT_TRUE(oracle.query(std::uint64_t{1} << 29 | 1));
  EXPECT_TRUE(oracle.query(std::uint64_t{1} << 29 | 1));
  EXPECT_EQ(calls, 1);
}

TEST(BallBias, Examples) {
  const TruthTable one = TruthTable::constant(6, true);
  QueryOracle constant(one);
  EXPECT_EQ(ball_bias_statistic(constant, 13, VarSet({1, 2}), 2), 1);

  // Parity of the four complement coordinates, radius 1: centre sign s and four
  // neighbours of sign -s give |s - 4s| / 5.
  const TruthTable par = parity_function(6, 0b111100);
  QueryOracle oracle(par);
  EXPECT_EQ(ball_bias_statistic(oracle, 0, VarSet({1, 2}), 1), Rational(3, 5));
  EXPECT_EQ(oracle.queries_used(), 5U);
  EXPECT_THROW(ball_bias_statistic(oracle, 0, VarSet({1, 2}), 5), std::out_of_range);
}

TEST(BallBias, RandomFunctionBiasIsSmall) {
  // E|sum of |B| signs| ~ sqrt(2|B|/pi); the mean of e_S stays within a few
  // multiples of 1/sqrt(|B|).
  const int n = 12;
  const double volume = to_double(Rational(ball_volume(10, 3)));
  double total = 0;
  const int points = 200;
  for (int i = 0; i < points; ++i) {
    const TruthTable f = random_table(n, 500 + static_cast<std::uint64_t>(i));
    QueryOracle oracle(f);
    total += to_double(ball_bias_statistic(oracle, static_cast<std::uint64_t>(i) * 37 % 4096, VarSet({1, 2}), 3));
  }
  const double mean = total / points;
  EXPECT_NEAR(mean, std::sqrt(2 / (M_PI * volume)), 3 / std::sqrt(volume));
}

TEST(BallTesterParamsTest, DefaultsAndOverrides) {
  const auto bp = BallTesterParams::make(40, 2, Rational(1, 2));
  EXPECT_EQ(bp.m, 1024U * 40 * 40 * 4);
  // log2(32) + log2 log2(64) = 5 + 2.585 -> 8
  EXPECT_EQ(bp.r_ball, 8);
  EXPECT_FALSE(bp.m_overridden);
  EXPECT_FALSE(bp.hypothesis_holds);
  const auto desk = BallTesterParams::make(10, 2, Rational(1, 4), 200, 3);
  EXPECT_TRUE(desk.m_overridden);
  EXPECT_TRUE(desk.r_overridden);
  EXPECT_THROW(BallTesterParams::make(10, 2, Rational(1, 4)), std::invalid_argument);  // default r = 10 > 8
  EXPECT_THROW(BallTesterParams::make(10, 2, Rational(0)), std::invalid_argument);
}

TEST(BallTester, AcceptsConstantsAndDictators) {
  const auto bp = BallTesterParams::make(10, 2, Rational(1, 4), 200, 3);
  const TruthTable zero = TruthTable::constant(10, false);
  QueryOracle c(zero);
  EXPECT_TRUE(ball_tester(c, bp, Seed{1}).accept);
  const TruthTable dict = noisy_dictator(10, 1, Rational(1, 10), Seed{2});
  QueryOracle d(dict);
  const auto res = ball_tester(d, bp, Seed{3});
  EXPECT_TRUE(res.accept);
  EXPECT_TRUE(res.best_set.contains(1));
  EXPECT_EQ(res.min_count_to_accept, 2U);  // ceil(200 / 128)
}

TEST(BallTester, InfeasibleScanIsAnError) {
  const auto bp = BallTesterParams::make(40, 20, Rational(1, 2), 1, 1);
  QueryOracle oracle(40, [](std::uint64_t) { return true; });
  EXPECT_THROW(ball_tester(oracle, bp, Seed{1}), std::length_error);
}

TEST(BallTester, BudgetExhaustionPropagates) {
  const auto bp = BallTesterParams::make(8, 2, Rational(1, 4), 10, 2);
  const TruthTable f = random_table(8, 4);
  QueryOracle oracle(f, 20);
  EXPECT_THROW(ball_tester(oracle, bp, Seed{1}), BudgetExhausted);
  EXPECT_LE(oracle.queries_used(), 20U);
}

TEST(BallTester, PermutationEquivariance) {
  const auto bp = BallTesterParams::make(9, 2, Rational(1, 4), 60, 2);
  RngStream rng(Seed{8}, Stream::kAux);
  for (int trial = 0; trial < 10; ++trial) {
    const TruthTable f = trial % 2 ? random_table(9, 50 + static_cast<std::uint64_t>(trial))
                                   : noisy_dictator(9, 1 + trial % 9, Rational(1, 4), Seed{static_cast<std::uint64_t>(trial)});
    std::vector<int> perm(9);
    std::iota(perm.begin(), perm.end(), 1);
    for (int i = 8; i > 0; --i) std::swap(perm[i], perm[rng.below(static_cast<std::uint64_t>(i) + 1)]);
    // g(x) = f(π x); points x for f correspond to π^{-1} x for g.
    const TruthTable g = permute_coordinates(f, perm);
    const auto pts = sample_points(Seed{static_cast<std::uint64_t>(trial)}, 9, bp.m);
    std::vector<std::uint64_t> moved;
    for (auto y : pts) {
      std::uint64_t x = 0;
      for (int j = 0; j < 9; ++j)
        if ((y >> (perm[j] - 1)) & 1U) x |= std::uint64_t{1} << j;
      moved.push_back(x);
    }
    QueryOracle of(f), og(g);
    const auto a = ball_tester_on_points(of, bp, pts);
    const auto b = ball_tester_on_points(og, bp, moved);
    EXPECT_EQ(a.accept, b.accept);
    EXPECT_EQ(a.best_count, b.best_count);
    EXPECT_EQ(a.queries, b.queries);
  }
}

TEST(SampleEstimate, Examples) {
  EXPECT_EQ(sample_estimate_dist_to_constant(TruthTable::constant(5, true), 37, Seed{1}), 0);
  EXPECT_EQ(sample_estimate_dist_to_constant(random_table(5, 3), 1, Seed{1}), 0);
  EXPECT_THROW(sample_estimate_dist_to_constant(random_table(5, 3), 0, Seed{1}), std::invalid_argument);
  const TruthTable par = parity_function(4, 0xF);
  int inside = 0;
  for (std::uint64_t s = 0; s < 200; ++s)
    inside += std::fabs(to_double(sample_estimate_dist_to_constant(par, 10000, Seed{s})) - 0.5) <= 0.02;
  EXPECT_GE(inside, 198);
}

TEST(SampleEstimate, ConcentratesAroundExactDistance) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const TruthTable f = random_table(1 + static_cast<int>(s % 12), s);
    const double exact = to_double(dist_to_constants(f));
    const double est = to_double(sample_estimate_dist_to_constant(f, 4000, Seed{s}));
    EXPECT_LE(est, 0.5);
    EXPECT_NEAR(est, exact, 5 * std::sqrt(std::log(4000.0) / 4000.0));
  }
}

TEST(PairCollision, Examples) {
  EXPECT_EQ(pair_collision_prob({0b10110}, 3, 1, 2), 0);
  // Differ exactly on {2, 4} ⊆ {2..5}: one of C(4, 2) sets collides.
  EXPECT_EQ(pair_collision_prob({0b00000, 0b01010}, 3, 1, 2), Rational(1, 6));
  // Differ on coordinate 1 ∈ [r].
  EXPECT_EQ(pair_collision_prob({0b00000, 0b01001}, 3, 1, 2), 0);
  EXPECT_THROW(pair_collision_prob({0}, 1, 2, 2), std::invalid_argument);  // ell > n - r
}

TEST(PairCollision, MatchesSubsetEnumerationAndUnionBound) {
  RngStream rng(Seed{21}, Stream::kAux);
  for (int trial = 0; trial < 300; ++trial) {
    const int ell = 1 + static_cast<int>(rng.below(3));
    const int r = static_cast<int>(rng.below(3));
    const int k = std::max(r + ell, 1) + static_cast<int>(rng.below(5));
    const int n = k + ell;
    std::vector<std::uint64_t> pts;
    const std::size_t q = 1 + rng.below(12);
    for (std::size_t i = 0; i < q; ++i) {
      if (!pts.empty() && rng.below(2) == 0)
        pts.push_back(pts[rng.below(pts.size())] ^ choose_subset(rng.split(), r + 1, n, ell).mask());
      else
        pts.push_back(rng.below(std::uint64_t{1} << n));
    }
    const Rational exact = pair_collision_prob(pts, k, r, ell);
    EXPECT_EQ(exact, brute_collision(pts, k, r, ell));
    EXPECT_LE(exact, *collision_union_bound(q, k, r, ell));
  }
}

TEST(Advantage, ThresholdStrategySeparates) {
  const auto rep = estimate_advantage(Strategy::Threshold, advantage_params(Rational(1, 32)), 500, Seed{2});
  EXPECT_EQ(rep.trials, 500U);
  EXPECT_GE(to_double(rep.p_accept_yes), 0.9);
  EXPECT_GE(1 - to_double(rep.p_accept_no), 0.9);
  ASSERT_TRUE(rep.threshold_rule.has_value());
  EXPECT_EQ(*rep.threshold_rule, ThresholdRule::Calibrated);
}

TEST(Advantage, RandomBaselineCannotDistinguish) {
  StrategyOptions opt;
  opt.random_budget = 2;
  const auto rep = estimate_advantage(Strategy::Random, advantage_params(Rational(1, 32)), 500, Seed{3}, opt);
  EXPECT_LE(std::fabs(to_double(rep.p_accept_yes - rep.p_accept_no)), 0.1 + 3 * rep.stderr_advantage);
  EXPECT_EQ(rep.queries_yes.max, 2U);
}

TEST(Advantage, ReproducibleAndValidated) {
  const auto hp = advantage_params(Rational(3, 16));
  StrategyOptions opt;
  opt.threshold = Rational(22, 100);
  const auto a = estimate_advantage(Strategy::Threshold, hp, 40, Seed{5}, opt);
  const auto b = estimate_advantage(Strategy::Threshold, hp, 40, Seed{5}, opt);
  EXPECT_EQ(a.p_accept_yes, b.p_accept_yes);
  EXPECT_EQ(a.p_accept_no, b.p_accept_no);
  EXPECT_FALSE(a.threshold_rule.has_value());
  EXPECT_THROW(estimate_advantage(Strategy::Threshold, hp, 0, Seed{5}), std::invalid_argument);
  EXPECT_THROW(parse_strategy("oracle"), std::invalid_argument);
}

TEST(Advantage, IndependentOfThreadCount) {
  const auto hp = advantage_params(Rational(1, 8));
  setenv("JUNTA_LAB_THREADS", "1", 1);
  const auto one = estimate_advantage(Strategy::Random, hp, 64, Seed{9});
  setenv("JUNTA_LAB_THREADS", "4", 1);
  const auto four = estimate_advantage(Strategy::Random, hp, 64, Seed{9});
  unsetenv("JUNTA_LAB_THREADS");
  EXPECT_EQ(one.p_accept_yes, four.p_accept_yes);
  EXPECT_EQ(one.p_accept_no, four.p_accept_no);
}

TEST(Separation, ComplementDistanceGap) {
  HardInstanceParams hp = advantage_params(Rational(3, 16));
  const auto rep = separation_experiment(hp, 100, Seed{4});
  EXPECT_GT(rep.mean_no, rep.mean_yes);
  EXPECT_LE(rep.mean_yes_complement, rep.mean_no_complement - rep.complement_gap_required);
}

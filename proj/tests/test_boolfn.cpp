#include "junta/boolfn.hpp"
#include "junta/rng.hpp"

#include <gtest/gtest.h>

#include <map>
#include <sstream>

using namespace junta;

namespace {

TruthTable random_table(int n, std::uint64_t seed) {
  const CounterRng rng(Seed{seed}, Stream::kAux);
  return TruthTable::tabulate(n, [&](std::uint64_t x) { return rng.bit(x); });
}

// Reference: for each S, group points by their restriction to S in a map and
// charge the minority of each group.
Rational brute_dist_on(const TruthTable& f, const std::vector<int>& s) {
  std::map<std::vector<int>, std::pair<std::uint64_t, std::uint64_t>> groups;
  for (std::uint64_t x = 0; x < f.size(); ++x) {
    std::vector<int> key;
    for (int j : s) key.push_back(static_cast<int>((x >> (j - 1)) & 1U));
    auto& g = groups[key];
    (f[x] ? g.second : g.first) += 1;
  }
  std::uint64_t total = 0;
  for (const auto& [key, g] : groups) total += std::min(g.first, g.second);
  return ratio(total, f.size());
}

Rational brute_dist_k(const TruthTable& f, int k) {
  Rational best = 1;
  const int n = f.arity();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    if (std::popcount(mask) != k) continue;
    std::vector<int> s;
    for (int j = 1; j <= n; ++j)
      if ((mask >> (j - 1)) & 1U) s.push_back(j);
    best = std::min(best, brute_dist_on(f, s));
  }
  return best;
}

}  // namespace

TEST(PointEncoding, BitOrderMatchesCoordinates) {
  EXPECT_EQ(to_string(point_of_index(5, 3)), "101");
  EXPECT_EQ(to_string(point_of_index(1, 4)), "1000");
  EXPECT_EQ(index_of_point(parse_bits("0011")), 12U);
  for (std::uint64_t i = 0; i < 64; ++i) EXPECT_EQ(index_of_point(point_of_index(i, 6)), i);
  EXPECT_THROW(parse_bits("01x"), std::invalid_argument);
}

TEST(PointEncoding, FlipOnMatchesXorWithMask) {
  const VarSet s({2, 4});
  EXPECT_EQ(flip_on(0b0000U, s), 0b1010U);
  EXPECT_EQ(to_string(flip_on(parse_bits("1100"), s)), "1001");
}

TEST(BitHelpers, CompressDepositRoundTrip) {
  const std::uint64_t mask = 0b1011010;
  for (std::uint64_t v = 0; v < 16; ++v) EXPECT_EQ(compress_bits(deposit_bits(v, mask), mask), v);
  EXPECT_EQ(compress_bits(0b1111111, 0b1000001), 0b11U);
  EXPECT_EQ(deposit_bits(0b10, 0b1000001), 0b1000000U);
}

TEST(VarSetTest, ValidatesAndReportsMembership) {
  const VarSet s({1, 3, 7});
  EXPECT_EQ(s.size(), 3U);
  EXPECT_EQ(s.mask(), 0b1000101U);
  EXPECT_TRUE(s.contains(3));
  EXPECT_FALSE(s.contains(2));
  EXPECT_EQ(to_string(s), "{1,3,7}");
  EXPECT_EQ(VarSet::from_mask(0b1000101), s);
  EXPECT_THROW(VarSet({2, 2}), std::invalid_argument);
  EXPECT_THROW(VarSet({0}), std::out_of_range);
  EXPECT_THROW(s.check_within(6), std::out_of_range);
}

TEST(SubsetEnumeration, CountsAndOrder) {
  std::vector<std::vector<int>> seen;
  for_each_k_subset(2, 5, 2, [&](const std::vector<int>& idx) { seen.push_back(idx); });
  const std::vector<std::vector<int>> expected = {{2, 3}, {2, 4}, {2, 5}, {3, 4}, {3, 5}, {4, 5}};
  EXPECT_EQ(seen, expected);
  int count = 0;
  for_each_k_subset(1, 10, 4, [&](const std::vector<int>&) { ++count; });
  EXPECT_EQ(count, 210);
  count = 0;
  for_each_k_subset(1, 3, 0, [&](const std::vector<int>& idx) {
    EXPECT_TRUE(idx.empty());
    ++count;
  });
  EXPECT_EQ(count, 1);
}

TEST(TruthTableTest, ConstructorRejectsBadPayload) {
  EXPECT_THROW(TruthTable(3, {0x100}), std::invalid_argument);  // bit 8 is padding
  EXPECT_THROW(TruthTable(7, {0}), std::invalid_argument);
  EXPECT_THROW(TruthTable::constant(23, false), std::length_error);
  EXPECT_NO_THROW(TruthTable::constant(23, false, 23));
}

TEST(TruthTableTest, TextRoundTrip) {
  for (int n : {1, 2, 3, 5, 6, 7, 10}) {
    const TruthTable f = random_table(n, 100 + static_cast<std::uint64_t>(n));
    EXPECT_EQ(parse_truth_table(truth_table_text(f)), f) << n;
  }
}

TEST(TruthTableTest, HexLayout) {
  // f(x) = x1 on n = 3: table bits 1,3,5,7 set -> digits "aa".
  EXPECT_EQ(truth_table_text(dictator(3, 1)), "n=3\naa\n");
  // n = 1: one digit, low two bits.
  EXPECT_EQ(truth_table_text(TruthTable::constant(1, true)), "n=1\n3\n");
  EXPECT_EQ(parse_truth_table("n=2\n8\n"), and_function(2));
}

TEST(TruthTableTest, ReaderRejectsMalformedInput) {
  EXPECT_THROW(parse_truth_table("n=3\naaa\n"), std::invalid_argument);  // wrong length
  EXPECT_THROW(parse_truth_table("n=3\na\n"), std::invalid_argument);
  EXPECT_THROW(parse_truth_table("n=1\n7\n"), std::invalid_argument);  // padding bit
  EXPECT_THROW(parse_truth_table("m=3\naa\n"), std::invalid_argument);
  EXPECT_THROW(parse_truth_table("n=3\nzz\n"), std::invalid_argument);
}

TEST(Distance, ConstantsAndParity) {
  EXPECT_EQ(dist_to_constants(TruthTable::constant(4, true)), 0);
  EXPECT_EQ(dist_to_constants(parity_function(4, 0xF)), Rational(1, 2));
  EXPECT_EQ(dist_to_k_juntas(parity_function(4, 0xF), 3).distance, Rational(1, 2));
  EXPECT_EQ(dist_to_k_juntas(parity_function(4, 0xF), 4).distance, 0);
  EXPECT_EQ(dist_to_k_juntas(and_function(2), 1).distance, Rational(1, 4));
  EXPECT_EQ(dist_to_k_juntas(dictator(5, 3), 1).distance, 0);
  EXPECT_EQ(*dist_to_k_juntas(dictator(5, 3), 1).witness, VarSet({3}));
}

TEST(Distance, MatchesBruteForceOracle) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const int n = 1 + static_cast<int>(seed % 8);
    const TruthTable f = random_table(n, seed);
    for (int k = 0; k <= n; ++k) {
      const auto rep = dist_to_k_juntas(f, k);
      EXPECT_EQ(rep.distance, brute_dist_k(f, k)) << "n=" << n << " k=" << k;
      ASSERT_TRUE(rep.witness.has_value());
      EXPECT_EQ(dist_to_junta_on(f, *rep.witness), rep.distance);
    }
  }
}

TEST(Distance, JuntaOnSetMatchesOracleAcrossWordBoundaries) {
  const TruthTable f = random_table(9, 77);
  for (const auto& s : std::vector<std::vector<int>>{{}, {1}, {7}, {2, 8}, {1, 2, 3, 4, 5, 6}, {3, 6, 7, 9}})
    EXPECT_EQ(dist_to_junta_on(f, VarSet(s)), brute_dist_on(f, s));
}

TEST(Distance, MonotoneInK) {
  const TruthTable f = random_table(7, 5);
  for (int k = 0; k < 7; ++k) EXPECT_GE(dist_to_k_juntas(f, k).distance, dist_to_k_juntas(f, k + 1).distance);
}

TEST(Distance, InvariantUnderCoordinatePermutation) {
  const TruthTable f = random_table(6, 9);
  const TruthTable g = permute_coordinates(f, {3, 1, 6, 2, 5, 4});
  for (int k = 0; k <= 6; ++k) EXPECT_EQ(dist_to_k_juntas(f, k).distance, dist_to_k_juntas(g, k).distance);
}

TEST(Distance, JuntaDistanceAtMostHalf) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const TruthTable f = random_table(5, 1000 + seed);
    for (int k = 0; k <= 5; ++k) EXPECT_LE(dist_to_k_juntas(f, k).distance, Rational(1, 2));
  }
}

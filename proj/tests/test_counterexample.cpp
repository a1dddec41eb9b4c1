#include <gtest/gtest.h>

#include "oracles.hpp"
#include "strichartz/counterexample.hpp"
#include "strichartz/norms.hpp"

using namespace strichartz;
using namespace strichartz::counterexample;

TEST(PhiN, SupportAndMass) {
  const auto p1 = build_phi_N(1);
  ASSERT_EQ(p1.size(), 2u);
  EXPECT_EQ(p1[1], cplx(1.0));
  EXPECT_EQ(p1[-1], cplx(1.0));
  const auto p2 = build_phi_N(2);
  EXPECT_EQ(p2.size(), 4u);
  for (auto k : {-3, -2, 2, 3}) EXPECT_EQ(p2[k], cplx(1.0));
  for (std::int64_t N : {1, 4, 64}) {
    EXPECT_EQ(build_phi_N(N).mass(), 2.0 * N);
    EXPECT_EQ(std::pow(build_phi_N(N).mass(), 4), std::pow(2.0 * N, 4));
  }
  EXPECT_THROW(build_phi_N(6), std::invalid_argument);
}

TEST(L8Ratio, SmallNFixtures) {
  const auto r1 = l8_ratio(1);
  EXPECT_NEAR(r1.l8_eighth_power, 70.0, 70.0 * 1e-12);
  EXPECT_NEAR(r1.ratio, 70.0 / 16.0, 1e-12);
  const std::int64_t Ns[] = {4, 8, 16, 32};
  for (int i = 0; i < 4; ++i) {
    const auto r = l8_ratio(Ns[i]);
    EXPECT_EQ(r.l8_eighth_power, static_cast<double>(oracle::frozen::l8_eighth[i])) << Ns[i];
    EXPECT_DOUBLE_EQ(r.ratio, r.l8_eighth_power / std::pow(2.0 * Ns[i], 4));
  }
}

TEST(L8Ratio, SmallNMatchesGridQuadrature) {
  for (std::int64_t N : {1, 2}) {
    const auto u = build_phi_N(N);
    EXPECT_NEAR(l8_ratio(N).l8_eighth_power, oracle::grid_lp_power(u, 8), 1e-9 * l8_ratio(N).l8_eighth_power);
  }
}

TEST(L8Ratio, GrowsAndFitsLogN) {
  const auto sweep = l8_ratio_sweep({4, 8, 16, 32, 64});
  ASSERT_EQ(sweep.rows.size(), 5u);
  for (std::size_t i = 1; i < sweep.rows.size(); ++i) EXPECT_GT(sweep.rows[i].ratio, sweep.rows[i - 1].ratio);
  EXPECT_GT(sweep.rows.back().ratio, sweep.rows.front().ratio);
  EXPECT_GT(sweep.fit.slope, 0.0);
  EXPECT_GE(sweep.fit.r2, 0.9);
  EXPECT_THROW(l8_ratio(512), guard_error);
}

TEST(MSet, RegressionFixtureAndOracle) {
  EXPECT_EQ(m_set_count({1, 0, 4}), oracle::frozen::m_set_N4);
  EXPECT_EQ(m_set_count({1, 0, 4}), oracle::naive_m_set_count(1, 0, 4));
  for (std::int64_t N : {4, 8})
    for (std::int64_t xi4 : {-1, 0, 1, 2})
      for (std::int64_t a : {1, 2, 3, 5}) EXPECT_EQ(m_set_count({a, xi4, N}), oracle::naive_m_set_count(a, xi4, N)) << N << " " << xi4 << " " << a;
}

TEST(MSet, BinsPartitionAdmissibleTriples) {
  for (std::int64_t N : {4, 8, 16})
    for (std::int64_t xi4 : {-N / 8, std::int64_t{0}, N / 4, N}) {
      const auto h = m_set_histogram(xi4, N);
      std::int64_t total = 0;
      for (const auto& [a, c] : h) {
        EXPECT_GE(a, 1);
        total += c;
      }
      EXPECT_EQ(total, admissible_triples(xi4, N));
    }
}

TEST(MSet, EmptyBeyondTrivialResonanceBound) {
  for (std::int64_t N : {4, 8, 16})
    for (std::int64_t xi4 : {0, 1, 3}) {
      const auto h = m_set_histogram(xi4, N);
      const double w = m_set_width(xi4, N);
      for (const auto& [a, c] : h) {
        if (c > 0) {
          EXPECT_LE(static_cast<double>(a - 1) * w, 64.0 * N * N * N);
        }
      }
    }
}

TEST(MSet, ShardsDoNotChangeCounts) {
  EXPECT_EQ(m_set_histogram(1, 32, 1), m_set_histogram(1, 32, 4));
}

TEST(MSet, WitnessIsASubset) {
  for (std::int64_t N : {16, 32})
    for (std::int64_t xi4 : {0, 1, 2}) {
      const auto full = m_set_histogram(xi4, N);
      const auto wit = m_set_witness_histogram(xi4, N);
      std::int64_t n = 0;
      for (const auto& [a, c] : wit) {
        auto it = full.find(a);
        ASSERT_NE(it, full.end());
        EXPECT_LE(c, it->second);
        n += c;
      }
      EXPECT_GT(n, 0);
    }
}

TEST(MSet, Guards) {
  EXPECT_THROW(m_set_count({0, 0, 8}), std::invalid_argument);
  EXPECT_THROW(m_set_count({1, 0, 256}), guard_error);
  EXPECT_THROW(m_set_count({1, 0, 12}), std::invalid_argument);
}

TEST(Grouped, MatchesGenericEngine) {
  for (std::int64_t N : {1, 2, 4, 8, 16}) {
    const auto g = grouped_l8_check(N);
    const double tol = N == 1 ? 1e-12 : N == 2 ? 1e-10 : 1e-9;
    EXPECT_LE(g.relative_difference, tol) << N;
    EXPECT_NEAR(g.generic, norms::lp_exact_torus(build_phi_N(N), 8).power(), 1e-9 * g.generic);
  }
  EXPECT_NEAR(grouped_l8_check(1).grouped, 70.0, 1e-12);
}

TEST(Grouped, PermutedDisplayValues) {
  const std::int64_t Ns[] = {1, 2, 4, 8};
  for (int i = 0; i < 4; ++i) EXPECT_EQ(grouped_l8_check(Ns[i]).permuted, oracle::frozen::permuted_l8[i]);
}

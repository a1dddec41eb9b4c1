#include <gtest/gtest.h>

#include "oracles.hpp"
#include "strichartz/extremizer.hpp"

using namespace strichartz;
using namespace strichartz::extremizer;

namespace {

Coeffs random_window(std::int64_t N, std::uint64_t seed) { return gaussian_window(N, SeedTree(seed)); }

}  // namespace

TEST(Objective, SingleModeAndFlatWindow) {
  for (int p : {4, 6, 8, 10, 14}) {
    const auto f = make_objective(p);
    EXPECT_NEAR(f(single_mode(3), false).value, 1.0, 1e-12) << p;
  }
  const auto f4 = make_objective(4);
  EXPECT_NEAR(f4(flat_window(1), false).value, static_cast<double>(oracle::quadruple_count({-1, 0, 1})) / 9.0, 1e-12);
  EXPECT_NEAR(f4(flat_window(4), false).value,
              static_cast<double>(oracle::quadruple_count({-4, -3, -2, -1, 0, 1, 2, 3, 4})) / 81.0, 1e-12);
}

TEST(Objective, CountingAgreesWithGridQuadrature) {
  for (int p : {4, 6, 8})
    for (std::int64_t N : {1, 3}) {
      const auto a = random_window(N, 10 + N);
      const double c = counting_objective(a, p, false).value;
      const auto g = grid_size(N, p);
      ASSERT_TRUE(g.exact);
      EXPECT_NEAR(grid_objective(a, p, false, g).value, c, 1e-10 * c) << p << " " << N;
    }
}

TEST(Objective, GridMatchesIndependentQuadrature) {
  const auto a = random_window(2, 5);
  const double v = make_objective(10)(a, false).value;
  EXPECT_NEAR(v, oracle::grid_lp_power(to_coeff_vector(a), 10), 1e-9 * v);
}

TEST(Objective, GradientMatchesFiniteDifferences) {
  for (int p : {4, 6, 8, 10, 12}) {
    const auto a = random_window(3, 100 + p);
    EXPECT_LT(finite_difference_check(make_objective(p), a, 1e-5).max_relative_error, 1e-6) << p;
  }
}

TEST(Objective, Homogeneity) {
  const auto a = random_window(3, 7);
  for (int p : {4, 8, 12}) {
    const auto f = make_objective(p);
    const double base = f(a, false).value;
    for (double c : {0.5, 2.0, 3.0}) {
      Coeffs b = a;
      for (auto& v : b) v *= cplx(0.0, c);
      EXPECT_NEAR(f(b, false).value, std::pow(c, p) * base, 1e-10 * std::pow(c, p) * base);
    }
  }
}

// Phase, space translation, time translation, reversal and conjugation all preserve the norm.
TEST(Objective, Symmetries) {
  const std::int64_t N = 3;
  const auto a = random_window(N, 21);
  for (int p : {4, 6, 10}) {
    const auto f = make_objective(p);
    const double base = f(a, false).value;
    auto check = [&](const Coeffs& b) { EXPECT_NEAR(f(b, false).value, base, 1e-10 * base) << p; };
    Coeffs phase = a, trans = a, time = a, rev(a.rbegin(), a.rend()), conj = a;
    for (std::int64_t k = -N; k <= N; ++k) {
      const auto i = static_cast<std::size_t>(k + N);
      phase[i] *= unit_phase(0.3);
      trans[i] *= unit_phase(0.17 * static_cast<double>(k));
      time[i] *= unit_phase(0.29 * static_cast<double>(k * k * k));
      conj[i] = std::conj(a[i]);
    }
    check(phase);
    check(trans);
    check(time);
    check(rev);
    check(conj);
  }
}

TEST(Objective, ContractsAndGuards) {
  EXPECT_THROW(make_objective(5), std::invalid_argument);
  EXPECT_THROW(make_objective(18), std::invalid_argument);
  EXPECT_THROW(window_N(Coeffs(4)), std::invalid_argument);
  EXPECT_THROW(normalized(Coeffs(3)), std::invalid_argument);
  EXPECT_THROW(counting_objective(Coeffs(401, 1.0), 4, true), guard_error);
  EXPECT_FALSE(grid_size(64, 14, 1 << 20).exact);
  EXPECT_TRUE(grid_size(4, 14).exact);
}

TEST(Ascent, MonotoneAndBelowSharpL4Constant) {
  AscentConfig cfg;
  cfg.restarts = 3;
  cfg.max_iters = 60;
  const auto r = ascend(4, 4, cfg);
  EXPECT_TRUE(r.monotone);
  EXPECT_EQ(r.traces.size(), 3u);
  for (const auto& tr : r.traces)
    for (std::size_t i = 1; i < tr.history.size(); ++i) EXPECT_GT(tr.history[i], tr.history[i - 1]);
  EXPECT_GE(r.objective, make_objective(4)(flat_window(4), false).value);
  EXPECT_LE(r.objective, 3.0 + 1e-3);
  EXPECT_NEAR(norm2(r.best), 1.0, 1e-12);
  EXPECT_NEAR(r.ratio, std::pow(r.objective, 0.25), 1e-15);
}

TEST(Ascent, DeterministicAcrossShards) {
  AscentConfig cfg;
  cfg.restarts = 4;
  cfg.max_iters = 20;
  cfg.seed = 17;
  const auto a = ascend(3, 6, cfg);
  const auto b = ascend(3, 6, cfg);
  cfg.shards = 3;
  const auto c = ascend(3, 6, cfg);
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_EQ(a.objective, c.objective);
  EXPECT_EQ(a.best_restart, c.best_restart);
  EXPECT_EQ(a.best, c.best);
  AscentConfig bad = cfg;
  bad.restarts = 0;
  EXPECT_THROW(ascend(3, 6, bad), std::invalid_argument);
}

TEST(ExponentFit, RowsBandAndGrowth) {
  AscentConfig cfg;
  cfg.restarts = 2;
  cfg.max_iters = 10;
  const auto fit = exponent_fit(8, {2, 4, 8, 16}, cfg, 4);
  ASSERT_EQ(fit.rows.size(), 4u);
  EXPECT_DOUBLE_EQ(fit.predicted, 0.0);
  EXPECT_LE(fit.band_lo, fit.fit.slope);
  EXPECT_GE(fit.band_hi, fit.fit.slope);
  for (const auto& row : fit.rows) {
    EXPECT_GE(row.best_ratio, row.flat_ratio);
    EXPECT_GE(row.best_ratio, 1.0);
  }
  EXPECT_GT(fit.rows.back().flat_ratio, fit.rows.front().flat_ratio);
  EXPECT_THROW(exponent_fit(8, {2, 4}, cfg), std::invalid_argument);
}

#pragma once

// Independent reference implementations and frozen values for the test suite.
// Nothing here calls into the counting engine.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <vector>

#include "strichartz/lattice.hpp"

namespace oracle {

using cplx = std::complex<double>;

/// int_{T^2} |u(t, x)|^p by the uniform grid with T > p max|k|^3 and
/// X > p max|k| nodes; exact for even p since |u|^p is then a trigonometric
/// polynomial of lower degree in each variable. Phases e(k^3 j / T) are looked
/// up by exact integer reduction.
inline double grid_lp_power(const strichartz::lattice::CoeffVector& u, int p) {
  std::vector<std::pair<std::int64_t, cplx>> modes(u.begin(), u.end());
  const std::int64_t K = u.max_abs_frequency();
  const std::int64_t T = p * K * K * K + 1, X = p * K + 1;
  const double two_pi = 2.0 * std::acos(-1.0);
  std::vector<cplx> et(static_cast<std::size_t>(T)), ex(static_cast<std::size_t>(X));
  for (std::int64_t j = 0; j < T; ++j) et[j] = std::polar(1.0, two_pi * static_cast<double>(j) / static_cast<double>(T));
  for (std::int64_t j = 0; j < X; ++j) ex[j] = std::polar(1.0, two_pi * static_cast<double>(j) / static_cast<double>(X));
  auto mod = [](std::int64_t a, std::int64_t n) { return ((a % n) + n) % n; };
  long double total = 0.0L;
  std::vector<cplx> c(modes.size());
  for (std::int64_t j = 0; j < T; ++j) {
    for (std::size_t m = 0; m < modes.size(); ++m) {
      const auto k = modes[m].first;
      c[m] = modes[m].second * et[mod(mod(k * k * k, T) * j, T)];
    }
    for (std::int64_t i = 0; i < X; ++i) {
      cplx v = 0.0;
      for (std::size_t m = 0; m < modes.size(); ++m) v += c[m] * ex[mod(modes[m].first * i, X)];
      total += std::pow(std::abs(v), p);
    }
  }
  return static_cast<double>(total / static_cast<long double>(T * X));
}

/// #{(k1, k2, k3, k4) in S^4 : k1 + k2 = k3 + k4, k1^3 + k2^3 = k3^3 + k4^3}
/// for unit amplitudes, by direct quadruple enumeration.
inline std::int64_t quadruple_count(const std::vector<std::int64_t>& s) {
  std::int64_t n = 0;
  for (auto a : s)
    for (auto b : s)
      for (auto c : s)
        for (auto d : s)
          if (a + b == c + d && a * a * a + b * b * b == c * c * c + d * d * d) ++n;
  return n;
}

inline std::int64_t naive_totient(std::int64_t q) {
  if (q == 1) return 1;
  std::int64_t n = 0;
  for (std::int64_t a = 1; a < q; ++a)
    if (std::gcd(a, q) == 1) ++n;
  return n;
}

inline std::int64_t naive_divisors_below(std::int64_t g, std::int64_t Q) {
  g = g < 0 ? -g : g;
  std::int64_t n = 0;
  for (std::int64_t d = 1; d < Q && d <= g; ++d)
    if (g % d == 0) ++n;
  return n;
}

/// c_q(g) = sum over a in P_q of cos(2 pi a g / q).
inline double naive_ramanujan(std::int64_t q, std::int64_t g) {
  double s = 0.0;
  for (std::int64_t a = 1; a <= q; ++a)
    if (std::gcd(a, q) == 1) s += std::cos(2.0 * std::acos(-1.0) * static_cast<double>(a * g % q) / static_cast<double>(q));
  return s;
}

/// |M(alpha, xi4)| with the four indicator constraints, by a plain triple loop
/// over a box that contains every admissible triple.
inline std::int64_t naive_m_set_count(std::int64_t alpha, std::int64_t xi4, std::int64_t N) {
  const double w = std::sqrt(1.0 + static_cast<double>(xi4 * xi4)) * static_cast<double>(N * N);
  std::int64_t n = 0;
  for (std::int64_t x1 = -N; x1 <= N; ++x1)
    for (std::int64_t x2 = -4 * N; x2 <= 4 * N; ++x2)
      for (std::int64_t x3 = -N; x3 <= N; ++x3) {
        if (std::abs(x1 - x2) > N || std::abs(x3 - x2 + xi4) > N) continue;
        const double r = std::abs(static_cast<double>(x2 * (x1 - x3) * (x1 + x3 - x2)));
        if (static_cast<double>(alpha - 1) * w <= r && r < static_cast<double>(alpha) * w) ++n;
      }
  return n;
}

/// Frozen values, each produced once by an independent computation and
/// recorded here so regressions are caught.
namespace frozen {

/// ||phi_N||_8^8 on T^2 for N = 4, 8, 16, 32 (exact integers).
inline constexpr std::int64_t l8_eighth[] = {190120, 4676560, 95966080, 1734412960};

/// |M(1, 0)| at N = 4.
inline constexpr std::int64_t m_set_N4 = 441;

/// Farey pair counts for Q = 2, 4, 8, 64.
inline constexpr std::int64_t farey_counts[] = {3, 14, 54, 3730};

/// sum_{q in [Q, 2Q)} phi(q) / q^2 at Q = 16 and Q = 2^20.
inline constexpr double totient_sum_16 = 0.4414911965523487;
inline constexpr double totient_sum_2_20 = 0.421383;

/// F Phi(0) for Q = 8 with the plateau bump on [0.01, 0.02].
inline constexpr double phi_hat0_Q8 = 0.00848340395129;

/// Permuted-phase variant of the grouped L^8 evaluation for N = 1, 2, 4, 8.
inline constexpr double permuted_l8[] = {22.0, 376.0, 6288.0, 104264.0};

/// divisor_count(720720, 10^6).
inline constexpr std::int64_t divisors_720720 = 240;

}  // namespace frozen

}  // namespace oracle

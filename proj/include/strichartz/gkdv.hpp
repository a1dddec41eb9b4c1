#pragma once

// Scaling, I-multiplier, Sobolev norms and the Hamiltonian for quintic gKdV
// data on T_lambda, with u(x) = (1/lambda) sum_k a_k e^{2 pi i k x / lambda}.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "strichartz/common.hpp"
#include "strichartz/fft.hpp"
#include "strichartz/lattice.hpp"

namespace strichartz::gkdv {

using lattice::CoeffVector;
using lattice::TorusSpec;

/// u0^lambda(x) = lambda^{-2/3} u0(x / lambda) on T_lambda: same numerators,
/// amplitudes times lambda^{1/3}, so the L^2 norm scales by lambda^{-1/6}.
inline CoeffVector rescale(const CoeffVector& u, std::int64_t lambda) {
  if (u.lambda() != 1) throw std::invalid_argument("rescale expects data on T (lambda = 1)");
  const TorusSpec torus(lambda);
  const double amp = std::cbrt(static_cast<double>(lambda));
  CoeffVector out(torus);
  for (const auto& [k, a] : u) out.set(k, a * amp);
  return out;
}

/// m(r) = 1 for r <= 1, r^{s-1} for r >= 2, r^{(s-1) w(r-1)} in between with
/// the smoothstep w(y) = 3y^2 - 2y^3.
struct IMultiplier {
  double N = 1.0;
  double s = 0.75;

  IMultiplier(double N_, double s_) : N(N_), s(s_) {
    if (!(N > 0.0)) throw std::invalid_argument("IMultiplier: N must be positive");
    if (!(s > 0.5 && s < 1.0)) throw std::invalid_argument("IMultiplier: s must lie in (1/2, 1)");
  }

  double symbol(double r) const {
    r = std::abs(r);
    if (r <= 1.0) return 1.0;
    if (r >= 2.0) return std::pow(r, s - 1.0);
    const double y = r - 1.0;
    const double w = y * y * (3.0 - 2.0 * y);
    return std::pow(r, (s - 1.0) * w);
  }

  /// m(xi / N)
  double operator()(double xi) const { return symbol(xi / N); }
};

inline CoeffVector apply_I(const CoeffVector& u, const IMultiplier& m) {
  CoeffVector out(u.torus());
  for (const auto& [k, a] : u) out.set(k, a * m(u.torus().frequency(k)));
  return out;
}

/// ||<xi>^s u^||_{L^2((d xi)_lambda)}
inline double sobolev_norm(const CoeffVector& u, double s) {
  CompensatedSum<double> acc;
  for (const auto& [k, a] : u) acc.add(std::pow(japanese(u.torus().frequency(k)), 2.0 * s) * std::norm(a));
  return std::sqrt(acc.value() / static_cast<double>(u.lambda()));
}

/// ||d_x u||_{L^2}^2 = (1/lambda) sum (2 pi xi)^2 |a|^2
inline double derivative_l2_squared(const CoeffVector& u) {
  CompensatedSum<double> acc;
  for (const auto& [k, a] : u) {
    const double xi = u.torus().frequency(k);
    acc.add(4.0 * kPi * kPi * xi * xi * std::norm(a));
  }
  return acc.value() / static_cast<double>(u.lambda());
}

inline constexpr std::size_t kMaxHamiltonianSupport = 200;

struct HamiltonianParts {
  double kinetic = 0.0;  ///< (1/8 pi^2) int (d_x u)^2
  double quintic = 0.0;  ///< int u^5
  double value() const { return kinetic - quintic / 20.0; }
};

namespace detail {

inline void require_real(const CoeffVector& u) {
  double scale = 0.0;
  for (const auto& [k, a] : u) scale = std::max(scale, std::abs(a));
  if (!u.conjugate_symmetric(1e-12 * std::max(scale, 1.0))) throw std::domain_error("hamiltonian: data is not real-valued");
}

}  // namespace detail

/// int_{T_lambda} u^5 = lambda^{-4} sum_{k1+...+k5=0} a_k1 ... a_k5, as
/// sum_K c2(K) c3(-K) with c2 = a*a and c3 = c2*a.
inline double quintic_integral(const CoeffVector& u) {
  if (u.size() > kMaxHamiltonianSupport) throw guard_error("quintic_integral: support above 200");
  std::vector<std::pair<std::int64_t, cplx>> a(u.begin(), u.end());
  std::unordered_map<std::int64_t, cplx> c2;
  for (const auto& [k1, v1] : a)
    for (const auto& [k2, v2] : a) c2[k1 + k2] += v1 * v2;
  std::vector<std::pair<std::int64_t, cplx>> c2v(c2.begin(), c2.end());
  std::sort(c2v.begin(), c2v.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  std::unordered_map<std::int64_t, cplx> c2_map(c2v.begin(), c2v.end());
  CompensatedSum<cplx> total;
  for (const auto& [K, v] : c2v) {
    CompensatedSum<cplx> c3;
    for (const auto& [k, w] : a) {
      auto it = c2_map.find(-K - k);
      if (it != c2_map.end()) c3.add(w * it->second);
    }
    total.add(v * c3.value());
  }
  return total.value().real() / std::pow(static_cast<double>(u.lambda()), 4);
}

/// int u^5 by the alias-free grid rule with more than 5 max|k| points.
inline double quintic_grid(const CoeffVector& u) {
  if (u.empty()) return 0.0;
  const auto X = next_pow2_above(static_cast<std::size_t>(5 * u.max_abs_frequency() + 1));
  FftPlan plan(X, FFTW_BACKWARD);
  plan.zero();
  const auto n = static_cast<std::int64_t>(X);
  for (const auto& [k, a] : u) plan[static_cast<std::size_t>(((k % n) + n) % n)] += a;
  plan.execute();
  const double lam = static_cast<double>(u.lambda());
  CompensatedSum<double> acc;
  for (std::size_t j = 0; j < X; ++j) acc.add(std::pow(plan[j].real() / lam, 5));
  return acc.value() * lam / static_cast<double>(X);
}

/// H(u) = (1/8 pi^2) int (d_x u)^2 - (1/20) int u^5 for real data.
inline HamiltonianParts hamiltonian_parts(const CoeffVector& u) {
  detail::require_real(u);
  HamiltonianParts h;
  h.kinetic = derivative_l2_squared(u) / (8.0 * kPi * kPi);
  h.quintic = quintic_integral(u);
  return h;
}

inline double hamiltonian(const CoeffVector& u) { return hamiltonian_parts(u).value(); }

/// ||I u||_{H^1} / (N^{1-s} ||u||_{H^s})
inline double i_h1_ratio(const CoeffVector& u, const IMultiplier& m) {
  return sobolev_norm(apply_I(u, m), 1.0) / (std::pow(m.N, 1.0 - m.s) * sobolev_norm(u, m.s));
}

struct SmallnessRow {
  std::int64_t lambda = 1;
  double N = 0.0;                 ///< lambda^{(1/6+s)/(1-s)} / log(2 + lambda)
  double derivative_squared = 0.0;  ///< ||I d_x u0^lambda||^2
  double hamiltonian = 0.0;       ///< H(I u0^lambda)
  double ratio = 0.0;             ///< hamiltonian / derivative_squared
};

inline double smallness_N(std::int64_t lambda, double s) {
  const double l = static_cast<double>(lambda);
  return std::pow(l, (1.0 / 6.0 + s) / (1.0 - s)) / std::log(2.0 + l);
}

inline std::vector<SmallnessRow> smallness_check(const CoeffVector& u0, double s, const std::vector<std::int64_t>& lambdas) {
  std::vector<SmallnessRow> rows;
  for (auto lam : lambdas) {
    SmallnessRow r;
    r.lambda = lam;
    r.N = smallness_N(lam, s);
    const IMultiplier m(r.N, s);
    const auto iu = apply_I(rescale(u0, lam), m);
    r.derivative_squared = derivative_l2_squared(iu);
    r.hamiltonian = hamiltonian(iu);
    r.ratio = r.derivative_squared > 0 ? r.hamiltonian / r.derivative_squared : 0.0;
    rows.push_back(r);
  }
  return rows;
}

struct FiveTuple {
  double residual = 0.0;  ///< |sum(tau_j - 4 pi^2 xi_j^3) + 12 pi^2 xi1 xi4 xi5|
  double scale = 0.0;     ///< N1^2 N
};

/// Residual of the five-frequency resonance identity under sum tau = sum xi = 0.
inline FiveTuple five_tuple_identity_check(const std::array<double, 5>& tau, const std::array<double, 5>& xi, double N1, double N) {
  double st = 0.0, sx = 0.0, mt = 0.0, mx = 0.0;
  for (int j = 0; j < 5; ++j) st += tau[j], sx += xi[j], mt = std::max(mt, std::abs(tau[j])), mx = std::max(mx, std::abs(xi[j]));
  if (std::abs(st) > 1e-9 * std::max(1.0, mt) || std::abs(sx) > 1e-9 * std::max(1.0, mx))
    throw std::domain_error("five_tuple_identity_check: requires sum tau = 0 and sum xi = 0");
  CompensatedSum<double> acc;
  for (int j = 0; j < 5; ++j) acc.add(tau[j] - 4.0 * kPi * kPi * xi[j] * xi[j] * xi[j]);
  acc.add(12.0 * kPi * kPi * xi[0] * xi[3] * xi[4]);
  return {std::abs(acc.value()), N1 * N1 * N};
}

}  // namespace strichartz::gkdv

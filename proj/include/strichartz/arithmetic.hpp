#pragma once

// Circle-method toolkit: Weyl sums, Farey pairs and major arcs, Euler
// totients, divisor counts, the arc bump Phi with its Fourier coefficients,
// and the sup of the major-arc kernel K_1.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "strichartz/common.hpp"
#include "strichartz/fft.hpp"
#include "strichartz/lattice.hpp"
#include "strichartz/profiles.hpp"

namespace strichartz::arith {

using u128 = unsigned __int128;

// ---------------------------------------------------------------- Weyl sums

/// frac(x * n) for a double x and integer n >= 0, exact: x = m 2^-k, so the
/// fractional part is (m n mod 2^k) 2^-k.
inline long double frac_mul(double x, u128 n) {
  if (x == 0.0 || n == 0) return 0.0L;
  int exp = 0;
  const double mant = std::frexp(std::abs(x), &exp);  // |x| = mant 2^exp, mant in [0.5, 1)
  const auto m = static_cast<std::uint64_t>(std::ldexp(mant, 53));
  const int k = 53 - exp;  // |x| = m 2^-k
  long double f;
  if (k <= 0) {
    f = 0.0L;
  } else {
    // m < 2^53 and n < 2^70 keep the product below 2^123.
    const u128 prod = static_cast<u128>(m) * n;
    if (k >= 124) {
      f = std::ldexp(static_cast<long double>(prod), -k);
    } else {
      const u128 mask = (static_cast<u128>(1) << k) - 1;
      f = std::ldexp(static_cast<long double>(prod & mask), -k);
    }
  }
  if (x < 0 && f != 0.0L) f = 1.0L - f;
  return f;
}

inline constexpr std::int64_t kMaxWeylLength = 10'000'000;

/// sum_{n=0}^{p} e^{2 pi i (t n^3 + a2 n^2 + a1 n + a0)}.
inline cplx weyl_sum(double t, double a2, double a1, double a0, std::int64_t p) {
  if (p < 0 || p > kMaxWeylLength) throw std::invalid_argument("weyl_sum: length must be in [0, 10^7]");
  CompensatedSum<cplx> acc;
  const long double c0 = a0 - std::floor(a0);
  for (std::int64_t n = 0; n <= p; ++n) {
    const u128 un = static_cast<u128>(n);
    long double th = frac_mul(t, un * un * un) + frac_mul(a2, un * un) + frac_mul(a1, un) + c0;
    th -= std::floor(th);
    acc.add(unit_phase(static_cast<double>(th)));
  }
  return acc.value();
}

/// Lemma shape p^{1+eps} (1/p + 1/q + q/p^3)^{1/4}.
inline double weyl_bound_shape(std::int64_t p, std::int64_t q, double eps) {
  const double P = static_cast<double>(p), Qd = static_cast<double>(q);
  return std::pow(P, 1.0 + eps) * std::pow(1.0 / P + 1.0 / Qd + Qd / (P * P * P), 0.25);
}

// ------------------------------------------------------------- number theory

inline std::vector<std::int64_t> totient_sieve(std::int64_t n) {
  std::vector<std::int64_t> phi(static_cast<std::size_t>(n + 1));
  std::iota(phi.begin(), phi.end(), 0);
  for (std::int64_t p = 2; p <= n; ++p)
    if (phi[static_cast<std::size_t>(p)] == p)
      for (std::int64_t m = p; m <= n; m += p) phi[static_cast<std::size_t>(m)] -= phi[static_cast<std::size_t>(m)] / p;
  return phi;
}

/// phi(q) by trial division.
inline std::int64_t totient(std::int64_t q) {
  if (q < 1) throw std::invalid_argument("totient of a nonpositive integer");
  std::int64_t r = q;
  for (std::int64_t p = 2; p * p <= q; ++p) {
    if (q % p) continue;
    while (q % p == 0) q /= p;
    r -= r / p;
  }
  if (q > 1) r -= r / q;
  return r;
}

inline constexpr std::int64_t kMaxQ = std::int64_t{1} << 20;

inline void require_Q(std::int64_t Q) {
  require_dyadic(Q, "Q");
  if (Q > kMaxQ) throw guard_error("Q above 2^20");
}

/// sum_{q in [Q, 2Q)} phi(q) / q^2 from a totient table.
inline double totient_sum(std::int64_t Q, const std::vector<std::int64_t>& phi) {
  CompensatedSum<double> s;
  for (std::int64_t q = Q; q < 2 * Q; ++q) {
    const double qd = static_cast<double>(q);
    s.add(static_cast<double>(phi[static_cast<std::size_t>(q)]) / (qd * qd));
  }
  return s.value();
}

inline double totient_sum(std::int64_t Q) {
  require_Q(Q);
  return totient_sum(Q, totient_sieve(2 * Q - 1));
}

/// Same sum with totients by trial division.
inline double totient_sum_trial(std::int64_t Q) {
  require_Q(Q);
  CompensatedSum<double> s;
  for (std::int64_t q = Q; q < 2 * Q; ++q) {
    const double qd = static_cast<double>(q);
    s.add(static_cast<double>(totient(q)) / (qd * qd));
  }
  return s.value();
}

namespace detail {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

inline std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = mulmod(r, b, m);
    b = mulmod(b, b, m);
    e >>= 1;
  }
  return r;
}

/// Deterministic Miller-Rabin for 64-bit inputs.
inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) d >>= 1, ++s;
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

/// A nontrivial factor of composite n (Brent's cycle variant of Pollard rho).
inline std::uint64_t pollard_brent(std::uint64_t n) {
  if (n % 2 == 0) return 2;
  for (std::uint64_t c = 1;; ++c) {
    std::uint64_t y = 2, x = 2, g = 1, q = 1, ys = 2;
    const std::uint64_t m = 128;
    std::uint64_t r = 1;
    auto f = [&](std::uint64_t v) { return (mulmod(v, v, n) + c) % n; };
    do {
      x = y;
      for (std::uint64_t i = 0; i < r; ++i) y = f(y);
      std::uint64_t k = 0;
      do {
        ys = y;
        for (std::uint64_t i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          q = mulmod(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
        k += m;
      } while (k < r && g == 1);
      r *= 2;
    } while (g == 1);
    if (g == n) {
      do {
        ys = f(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

inline void factor_into(std::uint64_t n, std::vector<std::uint64_t>& out) {
  if (n == 1) return;
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL}) {
    while (n % p == 0) out.push_back(p), n /= p;
  }
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  const std::uint64_t d = pollard_brent(n);
  factor_into(d, out);
  factor_into(n / d, out);
}

}  // namespace detail

/// Prime factorization as (prime, exponent), primes increasing.
inline std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t n) {
  std::vector<std::uint64_t> ps;
  detail::factor_into(n, ps);
  std::sort(ps.begin(), ps.end());
  std::vector<std::pair<std::uint64_t, int>> out;
  for (auto p : ps) {
    if (!out.empty() && out.back().first == p)
      ++out.back().second;
    else
      out.emplace_back(p, 1);
  }
  return out;
}

/// Number of positive divisors of |gamma| strictly below Q.
inline std::int64_t divisor_count(std::int64_t gamma, std::int64_t Q) {
  if (gamma == 0) throw std::domain_error("divisor_count: gamma must be nonzero");
  if (gamma == std::numeric_limits<std::int64_t>::min()) throw std::invalid_argument("divisor_count: |gamma| exceeds 2^63 - 1");
  const auto n = static_cast<std::uint64_t>(gamma < 0 ? -gamma : gamma);
  if (Q <= 1) return 0;
  const auto f = factorize(n);
  std::vector<std::uint64_t> divs{1};
  for (const auto& [p, e] : f) {
    const std::size_t cur = divs.size();
    std::uint64_t pk = 1;
    for (int i = 1; i <= e; ++i) {
      pk *= p;
      for (std::size_t j = 0; j < cur; ++j) {
        const u128 d = static_cast<u128>(divs[j]) * pk;
        if (d < static_cast<u128>(Q)) divs.push_back(static_cast<std::uint64_t>(d));
      }
    }
  }
  return static_cast<std::int64_t>(divs.size());
}

/// Ramanujan sum sum_{a in P_q} e^{-2 pi i a gamma / q} = sum_{d | gcd(q, gamma)} mu(q/d) d.
inline std::int64_t ramanujan_sum(std::int64_t q, std::int64_t gamma) {
  const std::int64_t g = std::gcd(q, gamma < 0 ? -gamma : gamma);
  std::int64_t total = 0;
  for (std::int64_t d = 1; d <= g; ++d) {
    if (g % d) continue;
    std::int64_t m = q / d, mu = 1;
    for (std::int64_t p = 2; p * p <= m && mu != 0; ++p) {
      if (m % p) continue;
      m /= p;
      if (m % p == 0) mu = 0;
      mu = -mu;
    }
    if (mu != 0 && m > 1) mu = -mu;
    total += mu * d;
  }
  return total;
}

// ---------------------------------------------------------------- major arcs

struct FareyPair {
  std::int64_t a = 0;
  std::int64_t q = 1;
  double value() const { return static_cast<double>(a) / static_cast<double>(q); }
};

struct MajorArcSystem {
  std::int64_t Q = 1;
  std::vector<FareyPair> pairs;  ///< sorted by a/q
  profiles::MollifiedPlateau bump = profiles::phi_bump();
};

inline constexpr std::size_t kMaxFareyPairs = std::size_t{1} << 26;

/// Coprime (a, q) with q in [Q, 2Q) and 1 <= a < q, sorted by a/q.
inline MajorArcSystem farey_pairs(std::int64_t Q) {
  require_Q(Q);
  const auto phi = totient_sieve(2 * Q - 1);
  std::size_t count = 0;
  for (std::int64_t q = Q; q < 2 * Q; ++q) count += static_cast<std::size_t>(phi[static_cast<std::size_t>(q)]);
  if (count > kMaxFareyPairs) throw guard_error("farey_pairs: " + std::to_string(count) + " pairs exceed the memory guard 2^26");
  MajorArcSystem sys;
  sys.Q = Q;
  sys.pairs.reserve(count);
  for (std::int64_t q = Q; q < 2 * Q; ++q)
    for (std::int64_t a = 1; a < q; ++a)
      if (std::gcd(a, q) == 1) sys.pairs.push_back({a, q});
  std::sort(sys.pairs.begin(), sys.pairs.end(), [](const FareyPair& x, const FareyPair& y) { return x.a * y.q < y.a * x.q; });
  return sys;
}

/// Whether the arcs [a/q - lo/q^2, a/q + hi/q^2] (lo, hi = num/den multiples)
/// are pairwise disjoint; checked exactly on consecutive fractions.
inline bool arcs_disjoint(const MajorArcSystem& sys, std::int64_t lo_num, std::int64_t hi_num, std::int64_t den) {
  using i128 = __int128;
  for (std::size_t i = 0; i + 1 < sys.pairs.size(); ++i) {
    const auto [a, q] = sys.pairs[i];
    const auto [b, r] = sys.pairs[i + 1];
    // a/q + hi/(den q^2) < b/r - lo/(den r^2), times den q^2 r^2.
    const i128 lhs = static_cast<i128>(den) * a * q * r * r + static_cast<i128>(hi_num) * r * r;
    const i128 rhs = static_cast<i128>(den) * b * r * q * q - static_cast<i128>(lo_num) * q * q;
    if (!(lhs < rhs)) return false;
  }
  return true;
}

/// Support arcs of Phi: [a/q, a/q + 0.03/q^2].
inline bool bump_arcs_disjoint(const MajorArcSystem& sys) { return arcs_disjoint(sys, 0, 3, 100); }

/// Phi(t) = sum phi((t - a/q) q^2) on [0, 1].
inline double phi_bump_eval(double t, const MajorArcSystem& sys) {
  if (t < 0.0 || t > 1.0) throw std::domain_error("phi_bump_eval: t must lie in [0, 1]");
  // Pairs with a/q <= t; the support reaches at most 0.03/Q^2 to the right.
  auto it = std::upper_bound(sys.pairs.begin(), sys.pairs.end(), t, [](double v, const FareyPair& p) { return v < p.value(); });
  const double reach = sys.bump.support_hi() / (static_cast<double>(sys.Q) * static_cast<double>(sys.Q));
  CompensatedSum<double> acc;
  while (it != sys.pairs.begin()) {
    --it;
    if (t - it->value() > reach) break;
    const double q2 = static_cast<double>(it->q) * static_cast<double>(it->q);
    acc.add(sys.bump((t - it->value()) * q2));
  }
  return acc.value();
}

/// F_[0,1] Phi(gamma) = sum_q (1/q^2) c_q(gamma) F phi(gamma / q^2), c_q the Ramanujan sum.
inline cplx phi_fourier(std::int64_t gamma, const MajorArcSystem& sys) {
  CompensatedSum<cplx> acc;
  for (std::int64_t q = sys.Q; q < 2 * sys.Q; ++q) {
    const double q2 = static_cast<double>(q) * static_cast<double>(q);
    const auto c = static_cast<double>(ramanujan_sum(q, gamma));
    if (c == 0.0) continue;
    acc.add(c / q2 * sys.bump.transform(static_cast<double>(gamma) / q2));
  }
  return acc.value();
}

/// Same coefficient by direct summation over the pairs.
inline cplx phi_fourier_direct(std::int64_t gamma, const MajorArcSystem& sys) {
  CompensatedSum<cplx> acc;
  for (const auto& [a, q] : sys.pairs) {
    const double q2 = static_cast<double>(q) * static_cast<double>(q);
    const double frac = static_cast<double>((a * (gamma % q) % q + q) % q) / static_cast<double>(q);
    acc.add(unit_phase(-frac) / q2 * sys.bump.transform(static_cast<double>(gamma) / q2));
  }
  return acc.value();
}

/// ||Phi||^2_{L^2[0,1]} = (int phi^2) sum 1/q^2 over pairs (arcs are disjoint).
inline double phi_l2_squared(const MajorArcSystem& sys) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const auto& b = sys.bump;
  const double i2 = GK::integrate([&](double s) { return b(s) * b(s); }, b.support_lo(), b.support_hi(), 12, 1e-13);
  CompensatedSum<double> s;
  for (const auto& [a, q] : sys.pairs) s.add(1.0 / (static_cast<double>(q) * static_cast<double>(q)));
  return i2 * s.value();
}

/// Bound shape min{<gamma>^eps, Q} / (Q^{1-eps} <gamma/Q^2>^A).
inline double phi_decay_shape(std::int64_t gamma, std::int64_t Q, double eps, double A) {
  const double g = static_cast<double>(gamma), Qd = static_cast<double>(Q);
  return std::min(std::pow(japanese(g), eps), Qd) / (std::pow(Qd, 1.0 - eps) * std::pow(japanese(g / (Qd * Qd)), A));
}

/// |F Phi(0)|^2 + 2 sum_{1 <= gamma <= Gamma} |F Phi(gamma)|^2 (Phi is real).
inline double parseval_partial(const MajorArcSystem& sys, std::int64_t Gamma) {
  CompensatedSum<double> acc;
  acc.add(std::norm(phi_fourier(0, sys)));
  for (std::int64_t g = 1; g <= Gamma; ++g) acc.add(2.0 * std::norm(phi_fourier(g, sys)));
  return acc.value();
}

struct DecayFit {
  double C = 0.0;                ///< sup of |F Phi| / shape over the tabulated range
  std::int64_t violations = 0;   ///< points above C times the shape
  std::vector<std::pair<std::int64_t, double>> per_Q;  ///< (Q, max ratio)
  double holdout_C = 0.0;        ///< sup over Q <= holdout_from only
  std::int64_t holdout_violations = 0;  ///< larger Q above holdout_C times the shape
};

/// Ratios |F Phi(gamma)| / phi_decay_shape over gamma in [0, factor Q^2] for each Q.
inline DecayFit decay_fit(const std::vector<std::int64_t>& Qs, std::int64_t factor, double eps = 0.05, double A = 2.0,
                          std::int64_t holdout_from = 16) {
  DecayFit f;
  std::vector<std::vector<double>> ratios;
  for (auto Q : Qs) {
    const auto sys = farey_pairs(Q);
    std::vector<double> r;
    const std::int64_t G = factor * Q * Q;
    double mx = 0.0;
    for (std::int64_t g = 0; g <= G; ++g) {
      r.push_back(std::abs(phi_fourier(g, sys)) / phi_decay_shape(g, Q, eps, A));
      mx = std::max(mx, r.back());
    }
    f.per_Q.emplace_back(Q, mx);
    f.C = std::max(f.C, mx);
    if (Q <= holdout_from) f.holdout_C = std::max(f.holdout_C, mx);
    ratios.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < Qs.size(); ++i)
    for (double r : ratios[i]) {
      if (r > f.C) ++f.violations;
      if (Qs[i] > holdout_from && r > f.holdout_C) ++f.holdout_violations;
    }
  return f;
}

// ------------------------------------------------------------------- kernels

/// Q = N if N <= L^2, else L^2; raised to 2 so that P_q is nonempty.
inline std::int64_t kernel_Q(std::int64_t L, std::int64_t N) { return std::max<std::int64_t>(2, N <= L * L ? N : L * L); }

struct KernelSup {
  std::int64_t Q = 0;
  double sup_K = 0.0;     ///< sampled sup of |K| over the arc grid
  double sup_K1 = 0.0;    ///< sampled sup of |K_1| = Phi/F Phi(0) |K|
  double phi_hat0 = 0.0;  ///< F Phi(0)
  double ratio = 0.0;     ///< sup_K1 / (lambda^2 N^{3/4+eps} L^{3/4+eps})
};

inline constexpr std::int64_t kMaxKernelLambdaN = 512;

/// Sampled sup of |K_1| with K(t, x) = eta~(t) sum_{xi1 in A_L, xi2 in A_N} e((xi1^3 - xi2^3) t + (xi1 - xi2) x).
/// t runs over `t_per_arc` points in each support arc of Phi, shifted by
/// integers m with |m| < `shifts`; x over a grid of `x_oversample` times the
/// alias-free size.
inline KernelSup kernel_K1_sup(std::int64_t L, std::int64_t N, const lattice::TorusSpec& torus, double eps = 0.05,
                               int t_per_arc = 4, int shifts = 2, std::size_t x_oversample = 4) {
  require_dyadic(L, "L");
  require_dyadic(N, "N");
  const std::int64_t lam = torus.lambda;
  if (lam * N > kMaxKernelLambdaN) throw guard_error("kernel_K1_sup: lambda N above 512");
  KernelSup out;
  out.Q = kernel_Q(L, N);
  const auto sys = farey_pairs(out.Q);
  out.phi_hat0 = phi_fourier(0, sys).real();
  const auto kl = lattice::DyadicBlock(L).numerators(torus);
  const auto kn = lattice::DyadicBlock(N).numerators(torus);
  const double l = static_cast<double>(lam), l3 = l * l * l;
  const std::size_t X = x_oversample * next_pow2_above(static_cast<std::size_t>(2 * (2 * lam * N + 2 * lam * L)));
  FftPlan pl(X, FFTW_BACKWARD), pn(X, FFTW_BACKWARD);
  const auto& et = profiles::eta_tilde();
  std::vector<cplx> cl(kl.size()), cn(kn.size());
  auto sup_at = [&](double t) {
    for (std::size_t i = 0; i < kl.size(); ++i) cl[i] = unit_phase(std::fmod(static_cast<double>(lattice::cube(kl[i])) / l3 * t, 1.0));
    for (std::size_t i = 0; i < kn.size(); ++i) cn[i] = unit_phase(std::fmod(static_cast<double>(lattice::cube(kn[i])) / l3 * t, 1.0));
    // x = j lambda / X, so e(k x / lambda) = e(k j / X).
    auto fill = [](FftPlan& p, const std::vector<std::int64_t>& ks, const std::vector<cplx>& cs) {
      p.zero();
      const auto n = static_cast<std::int64_t>(p.size());
      for (std::size_t i = 0; i < ks.size(); ++i) p[static_cast<std::size_t>(((ks[i] % n) + n) % n)] += cs[i];
      p.execute();
    };
    fill(pl, kl, cl);
    fill(pn, kn, cn);
    double m = 0.0;
    for (std::size_t j = 0; j < X; ++j) m = std::max(m, std::abs(pl[j]) * std::abs(pn[j]));
    return m;
  };
  const double reach = sys.bump.support_hi();
  for (const auto& [a, q] : sys.pairs) {
    const double q2 = static_cast<double>(q) * static_cast<double>(q);
    for (int s = 0; s < t_per_arc; ++s) {
      const double off = reach * (static_cast<double>(s) + 0.5) / static_cast<double>(t_per_arc);
      const double t0 = static_cast<double>(a) / static_cast<double>(q) + off / q2;
      const double ph = sys.bump(off);
      for (int m = -shifts + 1; m < shifts; ++m) {
        const double t = t0 + m;
        const double e = std::abs(et(t));
        const double k = e * sup_at(t);
        out.sup_K = std::max(out.sup_K, k);
        out.sup_K1 = std::max(out.sup_K1, ph / out.phi_hat0 * k);
      }
    }
  }
  out.ratio = out.sup_K1 / (l * l * std::pow(static_cast<double>(N), 0.75 + eps) * std::pow(static_cast<double>(L), 0.75 + eps));
  return out;
}

/// Sup of |K| over a uniform grid in t on [-1, 1] (no arc restriction).
inline double kernel_K_sup_uniform(std::int64_t L, std::int64_t N, const lattice::TorusSpec& torus, std::size_t T) {
  const auto kl = lattice::DyadicBlock(L).numerators(torus);
  const auto kn = lattice::DyadicBlock(N).numerators(torus);
  const double l3 = std::pow(static_cast<double>(torus.lambda), 3);
  const std::size_t X = 4 * next_pow2_above(static_cast<std::size_t>(2 * (kl.back() + kn.back())));
  FftPlan pl(X, FFTW_BACKWARD), pn(X, FFTW_BACKWARD);
  double best = 0.0;
  for (std::size_t j = 0; j <= T; ++j) {
    const double t = -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(T);
    auto fill = [&](FftPlan& p, const std::vector<std::int64_t>& ks) {
      p.zero();
      const auto n = static_cast<std::int64_t>(p.size());
      for (auto k : ks) p[static_cast<std::size_t>(((k % n) + n) % n)] += unit_phase(std::fmod(static_cast<double>(lattice::cube(k)) / l3 * t, 1.0));
      p.execute();
    };
    fill(pl, kl);
    fill(pn, kn);
    double m = 0.0;
    for (std::size_t x = 0; x < X; ++x) m = std::max(m, std::abs(pl[x]) * std::abs(pn[x]));
    best = std::max(best, std::abs(profiles::eta_tilde()(t)) * m);
  }
  return best;
}

struct WeylRatio {
  std::int64_t p = 0;
  std::int64_t Q = 0;
  double max_ratio = 0.0;
  std::int64_t argmax_a = 0, argmax_q = 0;
  double argmax_t = 0.0;
};

/// max |S| / (p^{1+eps} (1/p + 1/q + q/p^3)^{1/4}) over arcs q in [Q, 2Q),
/// |t - a/q| <= 1/q^2 at offsets {-1, -1/2, 0, 1/2, 1}/q^2, with lower-order
/// coefficients drawn from the seed (the first draw is all zero).
inline WeylRatio weyl_bound_ratio(std::int64_t p, std::int64_t Q, double eps, const SeedTree& seed, int coefficient_draws = 3) {
  const auto sys = farey_pairs(Q);
  WeylRatio r;
  r.p = p;
  r.Q = Q;
  auto rng = seed.derive("weyl_bound_ratio").engine();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::array<double, 3>> coeffs{{0.0, 0.0, 0.0}};
  for (int i = 1; i < coefficient_draws; ++i) coeffs.push_back({unif(rng), unif(rng), unif(rng)});
  for (const auto& [a, q] : sys.pairs) {
    const double q2 = static_cast<double>(q) * static_cast<double>(q);
    const double shape = weyl_bound_shape(p, q, eps);
    for (double off : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
      const double t = static_cast<double>(a) / static_cast<double>(q) + off / q2;
      for (const auto& c : coeffs) {
        const double ratio = std::abs(weyl_sum(t, c[0], c[1], c[2], p)) / shape;
        if (ratio > r.max_ratio) r.max_ratio = ratio, r.argmax_a = a, r.argmax_q = q, r.argmax_t = t;
      }
    }
  }
  return r;
}

}  // namespace strichartz::arith

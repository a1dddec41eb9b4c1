#pragma once

// Projected gradient ascent for the periodic Airy Strichartz ratio
// ||sum_{|xi| <= N} a_xi e(t xi^3 + x xi)||_{L^p(T^2)} / ||a||_2.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "strichartz/common.hpp"
#include "strichartz/counting.hpp"
#include "strichartz/fft.hpp"
#include "strichartz/fit.hpp"
#include "strichartz/lattice.hpp"

namespace strichartz::extremizer {

using lattice::CoeffVector;

/// Coefficients a_{-N}, ..., a_N.
using Coeffs = std::vector<cplx>;

inline std::int64_t window_N(const Coeffs& a) {
  if (a.empty() || a.size() % 2 == 0) throw std::invalid_argument("coefficient window must have odd length 2N + 1");
  return static_cast<std::int64_t>(a.size() / 2);
}

inline CoeffVector to_coeff_vector(const Coeffs& a) {
  const std::int64_t N = window_N(a);
  CoeffVector u(lattice::TorusSpec(1));
  for (std::int64_t k = -N; k <= N; ++k) u.set(k, a[static_cast<std::size_t>(k + N)]);
  return u;
}

inline double norm2(const Coeffs& a) {
  CompensatedSum<double> s;
  for (const auto& v : a) s.add(std::norm(v));
  return s.value();
}

inline Coeffs normalized(Coeffs a) {
  const double n = std::sqrt(norm2(a));
  if (n == 0.0) throw std::invalid_argument("cannot normalize the zero vector");
  for (auto& v : a) v /= n;
  return a;
}

struct ObjGrad {
  double value = 0.0;
  Coeffs grad;  ///< dF/dRe a + i dF/dIm a; empty when not requested
};

inline constexpr std::size_t kMaxGradientSupport = 400;

/// ||u||_p^p by exact counting for p in {4, 6, 8}; gradient via the adjoint
/// convolution.
inline ObjGrad counting_objective(const Coeffs& a, int p, bool want_grad, unsigned shards = 1) {
  const std::int64_t N = window_N(a);
  if (want_grad && a.size() > kMaxGradientSupport) throw guard_error("counting_objective: gradient support above 400 modes");
  const auto u = to_coeff_vector(a);
  ObjGrad out;
  if (!want_grad) {
    out.value = u.empty() ? 0.0 : counting::lp_power(counting::singles<cplx>(u), p, shards);
    return out;
  }
  std::vector<std::int64_t> keys;
  for (std::int64_t k = -N; k <= N; ++k) keys.push_back(k);
  auto vg = counting::lp_power_gradient(u, p, shards, {}, keys);
  out.value = vg.value;
  out.grad = std::move(vg.grad);
  return out;
}

struct GridSize {
  std::size_t T = 0, X = 0;
  bool exact = true;  ///< T exceeds the t-degree p N^3 and X the x-degree p N
};

inline constexpr std::size_t kMaxGridNodes = std::size_t{1} << 22;

inline GridSize grid_size(std::int64_t N, int p, std::size_t max_t = kMaxGridNodes) {
  GridSize g;
  const auto n3 = static_cast<std::size_t>(lattice::cube(N));
  g.X = next_pow2_above(static_cast<std::size_t>(p) * static_cast<std::size_t>(std::max<std::int64_t>(N, 1)));
  g.T = next_pow2_above(static_cast<std::size_t>(p) * n3);
  if (g.T > max_t) g.T = max_t, g.exact = false;
  return g;
}

/// ||u||_p^p as the mean of |u|^p over an equispaced T x X grid of T^2; the
/// mean is exact once the grid exceeds the degrees of |u|^p.
inline ObjGrad grid_objective(const Coeffs& a, int p, bool want_grad, const GridSize& g) {
  if (p < 2 || p % 2 != 0) throw std::invalid_argument("grid_objective needs an even p >= 2");
  const std::int64_t N = window_N(a);
  const std::size_t T = g.T, X = g.X;
  const auto Tl = static_cast<std::int64_t>(T), Xl = static_cast<std::int64_t>(X);
  const std::size_t M = a.size();
  std::vector<std::int64_t> ks(M), cube_mod(M);
  for (std::size_t i = 0; i < M; ++i) {
    ks[i] = static_cast<std::int64_t>(i) - N;
    cube_mod[i] = ((lattice::cube(ks[i]) % Tl) + Tl) % Tl;
  }
  FftPlan back(X, FFTW_BACKWARD);
  FftPlan fwd(X, FFTW_FORWARD);
  std::vector<cplx> ph(M), step(M);
  for (std::size_t i = 0; i < M; ++i) step[i] = unit_phase(static_cast<double>(cube_mod[i]) / static_cast<double>(T));
  ObjGrad out;
  CompensatedSum<double> total;
  std::vector<CompensatedSum<cplx>> gacc(want_grad ? M : 0);
  const double half = 0.5 * static_cast<double>(p - 2);
  for (std::size_t j = 0; j < T; ++j) {
    // ph_i = e(xi_i^3 j / T); the recurrence is re-anchored every 256 nodes.
    if (j % 256 == 0) {
      for (std::size_t i = 0; i < M; ++i) {
        const auto r = static_cast<std::int64_t>((static_cast<unsigned __int128>(cube_mod[i]) * j) % T);
        ph[i] = unit_phase(static_cast<double>(r) / static_cast<double>(T));
      }
    }
    back.zero();
    for (std::size_t i = 0; i < M; ++i) back[static_cast<std::size_t>(((ks[i] % Xl) + Xl) % Xl)] += a[i] * ph[i];
    back.execute();
    CompensatedSum<double> row;
    if (want_grad) fwd.zero();
    for (std::size_t x = 0; x < X; ++x) {
      const double m2 = std::norm(back[x]);
      const double w = std::pow(m2, half);
      row.add(w * m2);
      if (want_grad) fwd[x] = w * back[x];
    }
    total.add(row.value());
    if (want_grad) {
      fwd.execute();
      for (std::size_t i = 0; i < M; ++i) gacc[i].add(fwd[static_cast<std::size_t>(((ks[i] % Xl) + Xl) % Xl)] * std::conj(ph[i]));
    }
    for (std::size_t i = 0; i < M; ++i) ph[i] *= step[i];
  }
  const double cells = static_cast<double>(T) * static_cast<double>(X);
  out.value = total.value() / cells;
  if (want_grad) {
    out.grad.resize(M);
    for (std::size_t i = 0; i < M; ++i) out.grad[i] = static_cast<double>(p) * gacc[i].value() / cells;
  }
  return out;
}

using Objective = std::function<ObjGrad(const Coeffs&, bool)>;

/// Counting for p in {4, 6, 8}, exact grid quadrature above.
inline Objective make_objective(int p, std::size_t max_t = kMaxGridNodes, unsigned shards = 1) {
  if (p < 4 || p % 2 != 0 || p > 16) throw std::invalid_argument("objective defined for even p in [4, 16]");
  if (p <= 8) return [p, shards](const Coeffs& a, bool g) { return counting_objective(a, p, g, shards); };
  return [p, max_t](const Coeffs& a, bool g) { return grid_objective(a, p, g, grid_size(window_N(a), p, max_t)); };
}

struct FdCheck {
  double max_relative_error = 0.0;
};

/// Central differences with step h in every real coordinate against the
/// analytic gradient; the error is measured relative to the gradient's max norm.
inline FdCheck finite_difference_check(const Objective& f, const Coeffs& a, double h = 1e-4) {
  const auto an = f(a, true);
  double scale = 0.0;
  for (const auto& g : an.grad) scale = std::max(scale, std::abs(g));
  FdCheck r;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (int part = 0; part < 2; ++part) {
      Coeffs ap = a, am = a;
      const cplx d = part == 0 ? cplx(h, 0.0) : cplx(0.0, h);
      ap[i] += d;
      am[i] -= d;
      const double fd = (f(ap, false).value - f(am, false).value) / (2.0 * h);
      const double an_i = part == 0 ? an.grad[i].real() : an.grad[i].imag();
      r.max_relative_error = std::max(r.max_relative_error, std::abs(fd - an_i) / std::max(scale, 1e-300));
    }
  }
  return r;
}

struct AscentConfig {
  int restarts = 4;  ///< restart 0 is the flat window, 1 a single mode, then Gaussian draws
  int max_iters = 200;
  double tolerance = 1e-8;  ///< on the relative objective change
  std::uint64_t seed = 0;
  unsigned shards = 1;
};

struct RestartTrace {
  int index = 0;
  int iters = 0;
  double objective = 0.0;
  std::vector<double> history;  ///< accepted objective values
};

struct AscentResult {
  std::int64_t N = 0;
  int p = 0;
  Coeffs best;
  double objective = 0.0;  ///< ||u||_p^p at the best unit vector
  double ratio = 0.0;      ///< objective^{1/p}
  int best_restart = 0;
  int iters = 0;  ///< summed over restarts
  bool monotone = true;
  std::vector<RestartTrace> traces;
};

inline Coeffs flat_window(std::int64_t N) { return normalized(Coeffs(static_cast<std::size_t>(2 * N + 1), cplx(1.0, 0.0))); }

inline Coeffs single_mode(std::int64_t N) {
  Coeffs a(static_cast<std::size_t>(2 * N + 1));
  a[static_cast<std::size_t>(N)] = 1.0;
  return a;
}

inline Coeffs gaussian_window(std::int64_t N, const SeedTree& seed) {
  auto rng = seed.engine();
  std::normal_distribution<double> g(0.0, 1.0);
  Coeffs a(static_cast<std::size_t>(2 * N + 1));
  for (auto& v : a) {
    const double re = g(rng), im = g(rng);
    v = cplx(re, im);
  }
  return normalized(a);
}

namespace detail {

inline RestartTrace climb(const Objective& f, Coeffs x, const AscentConfig& cfg, Coeffs& out) {
  RestartTrace tr;
  auto cur = f(x, true);
  tr.history.push_back(cur.value);
  double s = 1.0;
  for (int it = 0; it < cfg.max_iters; ++it) {
    // Tangential part of the gradient on the unit sphere.
    double radial = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) radial += (std::conj(x[i]) * cur.grad[i]).real();
    Coeffs d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) d[i] = cur.grad[i] - radial * x[i];
    const double dn = std::sqrt(norm2(d));
    if (dn < 1e-14 * std::max(1.0, std::abs(cur.value))) break;
    bool accepted = false;
    Coeffs trial;
    ObjGrad next;
    while (s >= 1e-12) {
      trial = x;
      for (std::size_t i = 0; i < x.size(); ++i) trial[i] += s / dn * d[i];
      trial = normalized(trial);
      next = f(trial, false);
      if (next.value > cur.value) {
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    if (!accepted) break;
    const double rel = (next.value - cur.value) / std::abs(cur.value);
    x = std::move(trial);
    cur = f(x, true);
    tr.history.push_back(cur.value);
    tr.iters = it + 1;
    s = std::min(1.0, 2.0 * s);
    if (rel < cfg.tolerance) break;
  }
  tr.objective = cur.value;
  out = std::move(x);
  return tr;
}

}  // namespace detail

inline AscentResult ascend(std::int64_t N, int p, const AscentConfig& cfg, const Objective& f) {
  if (cfg.restarts < 1) throw std::invalid_argument("ascend: restarts must be >= 1");
  if (cfg.tolerance <= 0) throw std::invalid_argument("ascend: tolerance must be positive");
  AscentResult res;
  res.N = N;
  res.p = p;
  std::vector<Coeffs> finals(static_cast<std::size_t>(cfg.restarts));
  res.traces.resize(static_cast<std::size_t>(cfg.restarts));
  const SeedTree root = SeedTree(cfg.seed).derive("ascend");
  parallel_for(static_cast<std::size_t>(cfg.restarts), cfg.shards, [&](std::size_t r) {
    Coeffs start = r == 0 ? flat_window(N) : r == 1 ? single_mode(N) : gaussian_window(N, root.derive(static_cast<std::uint64_t>(r)));
    res.traces[r] = detail::climb(f, std::move(start), cfg, finals[r]);
    res.traces[r].index = static_cast<int>(r);
  });
  for (std::size_t r = 0; r < finals.size(); ++r) {
    const auto& tr = res.traces[r];
    for (std::size_t i = 1; i < tr.history.size(); ++i)
      if (!(tr.history[i] > tr.history[i - 1])) res.monotone = false;
    res.iters += tr.iters;
    // Strictly greater keeps the lower index on ties.
    if (r == 0 || tr.objective > res.objective) {
      res.objective = tr.objective;
      res.best = finals[r];
      res.best_restart = static_cast<int>(r);
    }
  }
  res.ratio = std::pow(res.objective, 1.0 / p);
  return res;
}

inline AscentResult ascend(std::int64_t N, int p, const AscentConfig& cfg) {
  return ascend(N, p, cfg, make_objective(p, kMaxGridNodes, 1));
}

struct ExponentRow {
  std::int64_t N = 0;
  double best_ratio = 0.0;
  double flat_ratio = 0.0;
  int iters = 0;
  bool exact_grid = true;
};

struct ExponentFit {
  int p = 0;
  std::vector<ExponentRow> rows;
  LinearFit fit;  ///< log C = slope log N + intercept
  double band_lo = 0.0, band_hi = 0.0;  ///< 95% band on the slope (Student t)
  double predicted = 0.0;               ///< 1/2 - 4/p
};

/// Log-log regression of the best ratio found; ascent runs for N <= ascent_max_N,
/// larger N use the flat and single-mode baselines only.
inline ExponentFit exponent_fit(int p, const std::vector<std::int64_t>& Ns, const AscentConfig& cfg, std::int64_t ascent_max_N = 16,
                                std::size_t max_t = kMaxGridNodes) {
  if (Ns.size() < 3) throw std::invalid_argument("exponent_fit needs three or more N values");
  ExponentFit out;
  out.p = p;
  out.predicted = 0.5 - 4.0 / p;
  const auto f = make_objective(p, max_t, cfg.shards);
  std::vector<double> x, y;
  for (auto N : Ns) {
    ExponentRow row;
    row.N = N;
    row.exact_grid = p <= 8 || grid_size(N, p, max_t).exact;
    row.flat_ratio = std::pow(f(flat_window(N), false).value, 1.0 / p);
    row.best_ratio = std::max(row.flat_ratio, 1.0);  // single mode gives exactly 1
    if (N <= ascent_max_N) {
      const auto r = ascend(N, p, cfg, f);
      row.best_ratio = std::max(row.best_ratio, r.ratio);
      row.iters = r.iters;
    }
    out.rows.push_back(row);
    x.push_back(std::log(static_cast<double>(N)));
    y.push_back(std::log(row.best_ratio));
  }
  out.fit = linear_fit(x, y);
  const boost::math::students_t dist(static_cast<double>(Ns.size() - 2));
  const double tq = boost::math::quantile(boost::math::complement(dist, 0.025));
  out.band_lo = out.fit.slope - tq * out.fit.slope_se;
  out.band_hi = out.fit.slope + tq * out.fit.slope_se;
  return out;
}

}  // namespace strichartz::extremizer

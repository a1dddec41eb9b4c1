#pragma once

// Space-time L^p norms of Airy flows: exact even-p norms on T^2 by tuple
// counting, a randomized-shift sampled estimator, the bilinear L^4 norm on
// [-1, 1] x T_lambda weighted by eta, and superlevel-set tables.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "strichartz/common.hpp"
#include "strichartz/counting.hpp"
#include "strichartz/fft.hpp"
#include "strichartz/lattice.hpp"
#include "strichartz/profiles.hpp"

namespace strichartz::norms {

using lattice::CoeffVector;
using lattice::TorusSpec;

enum class Method { exact_counting, semi_analytic, sampled };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::exact_counting: return "exact-counting";
    case Method::semi_analytic: return "semi-analytic";
    default: return "sampled";
  }
}

struct NormResult {
  double value = 0.0;  ///< the norm itself, not its p-th power
  int p = 0;           ///< exponent; 0 for grid-based quantities
  Method method = Method::exact_counting;
  double std_error = 0.0;

  double power() const { return std::pow(value, p); }
};

/// Exact-mode cost guards on the support size M.
struct ExactGuards {
  std::size_t max_support_p8 = 1200;
  std::size_t max_support_p6 = 4000;
  std::size_t max_support_p4 = 200000;
};

inline void require_unit_torus(const CoeffVector& u, const char* what) {
  if (u.lambda() != 1) throw std::invalid_argument(std::string(what) + " is defined on T (lambda = 1) only");
}

/// ||e^{-t d^3/4pi^2} u0||_{L^p(T^2)} for p in {2, 4, 6, 8}, computed as
/// ||u^{p/2}||_{L^2}^2 by counting tuples with equal (sum, cubic sum).
inline NormResult lp_exact_torus(const CoeffVector& u0, int p, unsigned shards = 1, const ExactGuards& guards = {}) {
  require_unit_torus(u0, "lp_exact_torus");
  counting::half_power(p);
  const std::size_t M = u0.size();
  const std::size_t cap = p == 8 ? guards.max_support_p8 : p == 6 ? guards.max_support_p6 : guards.max_support_p4;
  if (p > 2 && M > cap)
    throw guard_error("support size " + std::to_string(M) + " too large for exact mode at p=" + std::to_string(p) + " (limit " +
                      std::to_string(cap) + "); use lp_sampled instead");
  double power = 0.0;
  if (u0.all_real())
    power = counting::lp_power(counting::singles<double>(u0), p, shards);
  else
    power = counting::lp_power(counting::singles<cplx>(u0), p, shards);
  return {std::pow(power, 1.0 / p), p, Method::exact_counting, 0.0};
}

/// ||u||_{L^4(T^2)}^4 in closed form: unordered pairs {xi, eta} with xi != eta
/// and xi + eta != 0 have a unique preimage; the diagonal and the antipodal
/// collapse at (0, 0) are added separately.
inline double l4_closed_form(const CoeffVector& u0) {
  require_unit_torus(u0, "l4_closed_form");
  std::vector<std::pair<std::int64_t, cplx>> m(u0.begin(), u0.end());
  CompensatedSum<double> generic, diagonal;
  CompensatedSum<cplx> antipodal;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto [ki, ai] = m[i];
    const double wi = std::norm(ai);
    if (ki != 0) diagonal.add(wi * wi);
    antipodal.add(ai * u0[-ki]);
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      const auto [kj, aj] = m[j];
      if (ki + kj != 0) generic.add(4.0 * wi * std::norm(aj));
    }
  }
  return generic.value() + diagonal.value() + std::norm(antipodal.value());
}

/// Options for sampled estimators.
struct SampleOptions {
  std::size_t t_samples = 256;  ///< time nodes per shift
  std::size_t shifts = 8;       ///< independent random shifts (>= 8)
};

namespace detail {

/// Mean and standard error of the mean.
inline std::pair<double, double> mean_se(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = ordered_sum(xs) / n;
  CompensatedSum<double> ss;
  for (double x : xs) ss.add((x - mean) * (x - mean));
  const double var = xs.size() > 1 ? ss.value() / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var / n)};
}

/// Writes sum_k c_k e^{2 pi i k j / X} for j < X into plan (folding k mod X).
inline void synthesize(FftPlan& plan, const std::vector<std::int64_t>& ks, const std::vector<cplx>& cs) {
  const auto X = static_cast<std::int64_t>(plan.size());
  plan.zero();
  for (std::size_t i = 0; i < ks.size(); ++i) {
    std::int64_t idx = ks[i] % X;
    if (idx < 0) idx += X;
    plan[static_cast<std::size_t>(idx)] += cs[i];
  }
  plan.execute();
}

}  // namespace detail

/// Randomized-shift estimator of ||u||_{L^p(T^2)}: the x-integral is exact on a
/// grid with more than p max|k| points; the t-integral averages equidistant
/// nodes under independent uniform shifts.
inline NormResult lp_sampled(const CoeffVector& u0, int p, const SampleOptions& opt, const SeedTree& seed) {
  require_unit_torus(u0, "lp_sampled");
  if (p < 2 || p % 2 != 0) throw std::invalid_argument("lp_sampled needs an even p >= 2");
  if (opt.t_samples < 16) throw std::invalid_argument("lp_sampled needs at least 16 time samples");
  if (opt.shifts < 8) throw std::invalid_argument("lp_sampled needs at least 8 shifts");
  if (u0.empty()) return {0.0, p, Method::sampled, 0.0};
  const std::int64_t K = u0.max_abs_frequency();
  if (K > (std::int64_t{1} << 26) / p) throw guard_error("lp_sampled: spatial grid would exceed 2^26 points");
  const std::size_t X = next_pow2_above(static_cast<std::size_t>(p * K));
  std::vector<std::int64_t> ks;
  std::vector<cplx> a;
  std::vector<double> cubes;
  for (const auto& [k, v] : u0) {
    ks.push_back(k);
    a.push_back(v);
    cubes.push_back(static_cast<double>(lattice::cube(k)));
  }
  FftPlan plan(X, FFTW_BACKWARD);
  std::vector<cplx> c(a.size());
  std::vector<double> estimates(opt.shifts);
  auto rng = seed.engine();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int half = p / 2;
  for (std::size_t r = 0; r < opt.shifts; ++r) {
    const double shift = unif(rng);
    CompensatedSum<double> acc;
    for (std::size_t j = 0; j < opt.t_samples; ++j) {
      const double t = (static_cast<double>(j) + shift) / static_cast<double>(opt.t_samples);
      for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] * unit_phase(std::fmod(cubes[i] * t, 1.0));
      detail::synthesize(plan, ks, c);
      CompensatedSum<double> row;
      for (std::size_t x = 0; x < X; ++x) row.add(std::pow(std::norm(plan[x]), half));
      acc.add(row.value() / static_cast<double>(X));
    }
    estimates[r] = acc.value() / static_cast<double>(opt.t_samples);
  }
  const auto [mean, se] = detail::mean_se(estimates);
  const double value = std::pow(mean, 1.0 / p);
  return {value, p, Method::sampled, mean > 0 ? value * se / (p * mean) : 0.0};
}

/// Time cutoff profile with its tabulated F(eta^4).
struct EtaProfile {
  profiles::MollifiedPlateau bump = profiles::eta();
  const profiles::EtaFourthTransform* fourth = &profiles::eta4_transform();

  double operator()(double t) const { return bump(t); }
  double fourth_transform(double nu) const { return (*fourth)(nu); }
  double fourth_integral() const { return fourth->integral(); }
  std::string id() const { return "eta=" + bump.id() + ";F(eta^4):step=1/256,max=1024"; }
};

inline const EtaProfile& default_eta() {
  static const EtaProfile e;
  return e;
}

enum class BilinearMode { semi_analytic, sampled, automatic };

struct BilinearOptions {
  BilinearMode mode = BilinearMode::automatic;
  double max_semi_cost = 2e8;  ///< semi-analytic guard on the estimated number of (a, b) terms
  SampleOptions sampling{512, 8};
  std::uint64_t seed = 0;
};

namespace detail {

/// Spectrum of uL * uN keyed by (K, Omega) with Omega = k1^3 + k2^3.
inline counting::GroupedSpectrum<cplx> product_spectrum(const CoeffVector& uL, const CoeffVector& uN) {
  counting::GroupedSpectrum<cplx> g;
  if (uL.empty() || uN.empty()) return g;
  const auto sl = counting::singles<cplx>(uL);
  const auto sn = counting::singles<cplx>(uN);
  return counting::convolve(sl, sn, false);
}

}  // namespace detail

/// Estimated work of the semi-analytic double sum: (#quadruples)^2 spread over
/// the S range, thinned by the fraction of E pairs inside the transform window.
inline double bilinear_semi_cost(const CoeffVector& uL, const CoeffVector& uN) {
  const double q4 = std::pow(static_cast<double>(uL.size()) * static_cast<double>(uN.size()), 2);
  const double KL = static_cast<double>(uL.max_abs_frequency()), KN = static_cast<double>(uN.max_abs_frequency());
  const double s_range = 4.0 * (KL + KN) + 1.0;
  const double lam = static_cast<double>(uL.lambda());
  const double e_range = 4.0 * (KL * KL * KL + KN * KN * KN) / 6.0 + 1.0;
  const double window = profiles::EtaFourthTransform::kMax * lam * lam * lam / 6.0;
  return q4 + q4 * q4 / s_range * std::min(1.0, 2.0 * window / e_range);
}

/// ||eta(t) (e^{t..} phi_L)(e^{t..} phi_N)||_{L^4([-1,1] x T_lambda)}.
///
/// Semi-analytic: value^4 = lambda^{-7} sum_S sum_{C,C'} d_S(C) conj(d_S(C')) F(eta^4)((C - C')/lambda^3)
/// with d the spectrum of (uL uN)^2 over integer numerators.
/// Sampled: exact x-integral on a grid of more than 4(KL + KN) points,
/// randomized-shift equidistant nodes on [-1, 1] in t.
inline NormResult bilinear_l4(const CoeffVector& uL, const CoeffVector& uN, const TorusSpec& torus, const EtaProfile& eta,
                              const BilinearOptions& opt = {}) {
  if (uL.torus() != torus || uN.torus() != torus) throw std::invalid_argument("bilinear_l4: coefficient tori differ");
  if (uL.empty() || uN.empty()) return {0.0, 4, opt.mode == BilinearMode::sampled ? Method::sampled : Method::semi_analytic, 0.0};
  const double lam = static_cast<double>(torus.lambda);
  BilinearMode mode = opt.mode;
  if (mode == BilinearMode::automatic)
    mode = bilinear_semi_cost(uL, uN) <= opt.max_semi_cost ? BilinearMode::semi_analytic : BilinearMode::sampled;

  if (mode == BilinearMode::semi_analytic) {
    if (bilinear_semi_cost(uL, uN) > opt.max_semi_cost)
      throw guard_error("bilinear_l4: estimated semi-analytic cost exceeds the guard; use sampled mode");
    const auto w = detail::product_spectrum(uL, uN);
    const double lam3 = lam * lam * lam;
    const std::int64_t window = static_cast<std::int64_t>(std::ceil(profiles::EtaFourthTransform::kMax * lam3 / 6.0));
    const std::int64_t s_lo = 2 * w.s_min(), s_hi = 2 * w.s_max();
    std::vector<double> per_s(static_cast<std::size_t>(s_hi - s_lo + 1), 0.0);
    parallel_for(per_s.size(), 1, [&](std::size_t i) {
      const std::int64_t S = s_lo + static_cast<std::int64_t>(i);
      counting::Group<cplx> d;
      counting::convolve_target(w, w, S, true, true, [&](std::int64_t E, cplx v) {
        d.e.push_back(E);
        d.v.push_back(v);
      });
      CompensatedSum<double> acc;
      for (std::size_t a = 0; a < d.size(); ++a) {
        acc.add(std::norm(d.v[a]) * eta.fourth_transform(0.0));
        for (std::size_t b = a + 1; b < d.size() && d.e[b] - d.e[a] < window; ++b) {
          const double nu = 6.0 * static_cast<double>(d.e[b] - d.e[a]) / lam3;
          acc.add(2.0 * (d.v[a] * std::conj(d.v[b])).real() * eta.fourth_transform(nu));
        }
      }
      per_s[i] = acc.value();
    });
    const double power = std::max(0.0, ordered_sum(per_s)) / std::pow(lam, 7);
    return {std::pow(power, 0.25), 4, Method::semi_analytic, 0.0};
  }

  // Sampled mode.
  const std::int64_t KL = uL.max_abs_frequency(), KN = uN.max_abs_frequency();
  const std::size_t X = next_pow2_above(static_cast<std::size_t>(4 * (KL + KN)));
  if (X > (std::size_t{1} << 24)) throw guard_error("bilinear_l4: spatial grid exceeds 2^24 points");
  std::vector<std::int64_t> kl, kn;
  std::vector<cplx> al, an, cl, cn;
  std::vector<double> cubes_l, cubes_n;
  const double lam3 = lam * lam * lam;
  for (const auto& [k, v] : uL) kl.push_back(k), al.push_back(v / lam), cubes_l.push_back(static_cast<double>(lattice::cube(k)) / lam3);
  for (const auto& [k, v] : uN) kn.push_back(k), an.push_back(v / lam), cubes_n.push_back(static_cast<double>(lattice::cube(k)) / lam3);
  cl.resize(al.size());
  cn.resize(an.size());
  FftPlan pl(X, FFTW_BACKWARD), pn(X, FFTW_BACKWARD);
  const SampleOptions& so = opt.sampling;
  if (so.t_samples < 16 || so.shifts < 8) throw std::invalid_argument("bilinear_l4: sampling needs >= 16 nodes and >= 8 shifts");
  auto rng = SeedTree(opt.seed).derive("bilinear_l4").engine();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> estimates(so.shifts);
  const double h = 2.0 / static_cast<double>(so.t_samples);
  for (std::size_t r = 0; r < so.shifts; ++r) {
    const double shift = unif(rng);
    CompensatedSum<double> acc;
    for (std::size_t j = 0; j < so.t_samples; ++j) {
      const double t = -1.0 + (static_cast<double>(j) + shift) * h;
      const double w = std::pow(eta(t), 4);
      if (w == 0.0) continue;
      for (std::size_t i = 0; i < al.size(); ++i) cl[i] = al[i] * unit_phase(std::fmod(cubes_l[i] * t, 1.0));
      for (std::size_t i = 0; i < an.size(); ++i) cn[i] = an[i] * unit_phase(std::fmod(cubes_n[i] * t, 1.0));
      detail::synthesize(pl, kl, cl);
      detail::synthesize(pn, kn, cn);
      CompensatedSum<double> row;
      for (std::size_t x = 0; x < X; ++x) {
        const double m = std::norm(pl[x] * pn[x]);
        row.add(m * m);
      }
      acc.add(w * row.value() * lam / static_cast<double>(X));
    }
    estimates[r] = acc.value() * h;
  }
  const auto [mean, se] = detail::mean_se(estimates);
  const double value = std::pow(std::max(mean, 0.0), 0.25);
  return {value, 4, Method::sampled, mean > 0 ? value * se / (4.0 * mean) : 0.0};
}

/// |B|(t, x_j) at cell centers x_j = (j + 1/2) lambda / X.
using FieldSampler = std::function<void(double t, std::size_t X, std::vector<double>& row)>;

/// Sampler for B(t, x) = eta(t) uL(t, x) uN(t, x).
inline FieldSampler bilinear_field(const CoeffVector& uL, const CoeffVector& uN, const EtaProfile& eta = default_eta()) {
  struct Data {
    std::vector<std::int64_t> kl, kn;
    std::vector<cplx> al, an;
    std::vector<double> cl, cn;
    double lambda;
    EtaProfile eta;
  };
  auto d = std::make_shared<Data>();
  const double lam = static_cast<double>(uL.lambda());
  const double lam3 = lam * lam * lam;
  d->lambda = lam;
  d->eta = eta;
  for (const auto& [k, v] : uL) d->kl.push_back(k), d->al.push_back(v / lam), d->cl.push_back(static_cast<double>(lattice::cube(k)) / lam3);
  for (const auto& [k, v] : uN) d->kn.push_back(k), d->an.push_back(v / lam), d->cn.push_back(static_cast<double>(lattice::cube(k)) / lam3);
  return [d](double t, std::size_t X, std::vector<double>& row) {
    row.assign(X, 0.0);
    const double w = d->eta(t);
    if (w == 0.0) return;
    FftPlan pl(X, FFTW_BACKWARD), pn(X, FFTW_BACKWARD);
    auto fill = [&](FftPlan& plan, const std::vector<std::int64_t>& ks, const std::vector<cplx>& as, const std::vector<double>& cs) {
      std::vector<cplx> c(as.size());
      for (std::size_t i = 0; i < as.size(); ++i) {
        // cell-center offset of half a grid step
        const double half = static_cast<double>(ks[i]) / (2.0 * static_cast<double>(X));
        c[i] = as[i] * unit_phase(std::fmod(cs[i] * t + half, 1.0));
      }
      detail::synthesize(plan, ks, c);
    };
    fill(pl, d->kl, d->al, d->cl);
    fill(pn, d->kn, d->an, d->cn);
    for (std::size_t x = 0; x < X; ++x) row[x] = w * std::abs(pl[x] * pn[x]);
  };
}

struct LevelSetTable {
  std::vector<double> thresholds;  ///< increasing
  std::vector<double> measures;    ///< |E_mu| at each threshold
  double total_measure = 0.0;      ///< 2 lambda
  double sampled_sup = 0.0;
  double sampled_l4_power = 0.0;   ///< cell sum of |B|^4
  std::size_t T = 0, X = 0;

  /// 4 int mu^3 |E_mu| d mu over the threshold grid, with the region below the
  /// first threshold counted as mu_0^4 |E_{mu_0}|.
  double layer_cake_l4_power() const {
    if (thresholds.empty()) return 0.0;
    CompensatedSum<double> acc;
    acc.add(std::pow(thresholds.front(), 4) * measures.front());
    for (std::size_t i = 0; i + 1 < thresholds.size(); ++i)
      acc.add((std::pow(thresholds[i + 1], 4) - std::pow(thresholds[i], 4)) * 0.5 * (measures[i] + measures[i + 1]));
    return acc.value();
  }

  double measure_above(double mu) const {
    auto it = std::lower_bound(thresholds.begin(), thresholds.end(), mu);
    if (it == thresholds.end()) return measures.empty() ? 0.0 : (mu <= sampled_sup ? measures.back() : 0.0);
    return measures[static_cast<std::size_t>(it - thresholds.begin())];
  }
};

/// Empirical distribution function of |B| on a T x X grid of cell centers over
/// [-1, 1] x [0, lambda). Thresholds default to 64 geometric points on
/// [sup / 10^3, sup] of the sampled field.
inline LevelSetTable superlevel_measure(const FieldSampler& field, const TorusSpec& torus, std::size_t T, std::size_t X,
                                        std::vector<double> thresholds = {}) {
  if (T < 64 || X < 64) throw std::invalid_argument("superlevel_measure needs a grid of at least 64 x 64");
  const double lam = static_cast<double>(torus.lambda);
  const double cell = (2.0 / static_cast<double>(T)) * (lam / static_cast<double>(X));
  std::vector<double> all;
  all.reserve(T * X);
  std::vector<double> row;
  LevelSetTable tab;
  tab.T = T;
  tab.X = X;
  tab.total_measure = 2.0 * lam;
  CompensatedSum<double> l4;
  for (std::size_t j = 0; j < T; ++j) {
    const double t = -1.0 + (static_cast<double>(j) + 0.5) * 2.0 / static_cast<double>(T);
    field(t, X, row);
    for (double v : row) {
      all.push_back(v);
      l4.add(v * v * v * v * cell);
    }
  }
  tab.sampled_l4_power = l4.value();
  std::sort(all.begin(), all.end());
  tab.sampled_sup = all.empty() ? 0.0 : all.back();
  if (thresholds.empty()) {
    const double top = tab.sampled_sup;
    if (top > 0.0)
      for (int i = 0; i < 64; ++i) thresholds.push_back(top * std::pow(10.0, -3.0 + 3.0 * i / 63.0));
  }
  std::sort(thresholds.begin(), thresholds.end());
  tab.thresholds = thresholds;
  for (double mu : thresholds) {
    const auto above = static_cast<double>(all.end() - std::lower_bound(all.begin(), all.end(), mu));
    tab.measures.push_back(above * cell);
  }
  return tab;
}

/// Sup of |B| forced by Cauchy-Schwarz on the supports:
/// |uL uN| <= (1/lambda^2) sum|a| sum|b| <= sqrt(nL/lambda) sqrt(nN/lambda) sqrt(massL massN).
inline double bilinear_sup_bound(const CoeffVector& uL, const CoeffVector& uN) {
  const double lam = static_cast<double>(uL.lambda());
  return std::sqrt(static_cast<double>(uL.size()) / lam * static_cast<double>(uN.size()) / lam * uL.mass() * uN.mass());
}

}  // namespace strichartz::norms

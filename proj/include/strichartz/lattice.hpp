#pragma once

// Frequency lattice Z/lambda of the torus T_lambda = R / lambda Z, coefficient
// vectors, the Airy flow and the exact algebraic identities built on it.
//
// A frequency xi = k / lambda is always carried by its integer numerator k.
// The flow of data a is
//
//   u(t, x) = (1/lambda) sum_k a_k e^{2 pi i (xi^3 t + xi x)},
//
// and the l^2 mass under the counting measure (d xi)_lambda is
// (1/lambda) sum_k |a_k|^2.

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "strichartz/common.hpp"

namespace strichartz::lattice {

/// Largest admissible |k|. Eight cubes of magnitude below 2^60 sum without
/// overflowing int64.
inline constexpr std::int64_t kMaxFrequency = (std::int64_t{1} << 20) - 1;

inline void check_frequency(std::int64_t k) {
  if (k > kMaxFrequency || k < -kMaxFrequency)
    throw guard_error("frequency numerator " + std::to_string(k) + " exceeds the 64-bit cube guard |k| < 2^20");
}

inline std::int64_t cube(std::int64_t k) { return k * k * k; }

struct TorusSpec {
  std::int64_t lambda = 1;

  TorusSpec() = default;
  explicit TorusSpec(std::int64_t period) : lambda(period) {
    if (period < 1) throw std::invalid_argument("torus period lambda must be >= 1");
  }

  double frequency(std::int64_t k) const { return static_cast<double>(k) / static_cast<double>(lambda); }
  friend bool operator==(const TorusSpec&, const TorusSpec&) = default;
};

/// Annulus {xi : N <= |xi| < 2N}, both signs.
struct DyadicBlock {
  std::int64_t scale = 1;

  DyadicBlock() = default;
  explicit DyadicBlock(std::int64_t n) : scale(n) { require_dyadic(n, "dyadic block scale"); }

  bool contains(std::int64_t k, const TorusSpec& torus) const {
    const std::int64_t a = k < 0 ? -k : k;
    return a >= scale * torus.lambda && a < 2 * scale * torus.lambda;
  }

  /// Numerators k of the annulus on Z/lambda, in increasing order.
  std::vector<std::int64_t> numerators(const TorusSpec& torus) const {
    const std::int64_t lo = scale * torus.lambda, hi = 2 * scale * torus.lambda;
    check_frequency(hi - 1);
    std::vector<std::int64_t> ks;
    ks.reserve(static_cast<std::size_t>(2 * (hi - lo)));
    for (std::int64_t k = -(hi - 1); k <= -lo; ++k) ks.push_back(k);
    for (std::int64_t k = lo; k < hi; ++k) ks.push_back(k);
    return ks;
  }
};

struct SpaceTimePoint {
  double t = 0.0;
  double x = 0.0;

  SpaceTimePoint() = default;
  SpaceTimePoint(double time, double position, const TorusSpec& torus) : t(time) {
    const double period = static_cast<double>(torus.lambda);
    x = std::fmod(position, period);
    if (x < 0) x += period;
  }
};

/// Finitely supported coefficients on Z/lambda. Zero amplitudes are never stored.
class CoeffVector {
 public:
  using Map = std::map<std::int64_t, cplx>;

  CoeffVector() = default;
  explicit CoeffVector(TorusSpec torus) : torus_(torus) {}

  const TorusSpec& torus() const { return torus_; }
  std::int64_t lambda() const { return torus_.lambda; }

  void set(std::int64_t k, cplx amplitude) {
    check_frequency(k);
    if (amplitude == cplx{})
      entries_.erase(k);
    else
      entries_[k] = amplitude;
  }

  cplx operator[](std::int64_t k) const {
    auto it = entries_.find(k);
    return it == entries_.end() ? cplx{} : it->second;
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const Map& entries() const { return entries_; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  /// (1/lambda) sum |a_k|^2
  double mass() const {
    CompensatedSum<double> s;
    for (const auto& [k, a] : entries_) s.add(std::norm(a));
    return s.value() / static_cast<double>(torus_.lambda);
  }

  std::int64_t max_abs_frequency() const {
    std::int64_t m = 0;
    for (const auto& [k, a] : entries_) m = std::max(m, k < 0 ? -k : k);
    return m;
  }

  bool all_real() const {
    for (const auto& [k, a] : entries_)
      if (a.imag() != 0.0) return false;
    return true;
  }

  /// a_{-k} == conj(a_k) for every k, i.e. the physical-space function is real.
  bool conjugate_symmetric(double tol = 0.0) const {
    for (const auto& [k, a] : entries_)
      if (std::abs((*this)[-k] - std::conj(a)) > tol * std::max(1.0, std::abs(a))) return false;
    return true;
  }

  CoeffVector scaled(cplx c) const {
    CoeffVector out(torus_);
    for (const auto& [k, a] : entries_) out.set(k, c * a);
    return out;
  }

  /// Rescaled to unit mass. Throws on the zero vector.
  CoeffVector normalized() const {
    const double m = mass();
    if (m <= 0.0) throw std::invalid_argument("cannot normalize the zero coefficient vector");
    return scaled(1.0 / std::sqrt(m));
  }

  friend bool operator==(const CoeffVector&, const CoeffVector&) = default;

 private:
  TorusSpec torus_{};
  Map entries_{};
};

/// e^{2 pi i (xi^3 t + xi x)} with xi = k / lambda.
inline cplx airy_phase(std::int64_t k, const TorusSpec& torus, const SpaceTimePoint& p) {
  check_frequency(k);
  const long double lam = static_cast<long double>(torus.lambda);
  const long double xi = static_cast<long double>(k) / lam;
  const long double cubic = static_cast<long double>(cube(k)) / (lam * lam * lam);
  long double theta = std::fmod(cubic * static_cast<long double>(p.t), 1.0L) + std::fmod(xi * static_cast<long double>(p.x), 1.0L);
  theta = std::fmod(theta, 1.0L);
  return unit_phase(static_cast<double>(theta));
}

/// x -> u(t, x) for the Airy flow of u0 at a fixed time.
class FlowEvaluator {
 public:
  FlowEvaluator(CoeffVector u0, double t) : u0_(std::move(u0)), t_(t) {
    modes_.reserve(u0_.size());
    const SpaceTimePoint at_origin(t_, 0.0, u0_.torus());
    for (const auto& [k, a] : u0_) modes_.push_back({k, a * airy_phase(k, u0_.torus(), at_origin)});
  }

  cplx operator()(double x) const {
    CompensatedSum<cplx> s;
    const SpaceTimePoint p(0.0, x, u0_.torus());
    for (const auto& m : modes_) s.add(m.amplitude * airy_phase(m.k, u0_.torus(), p));
    return s.value() / static_cast<double>(u0_.lambda());
  }

  /// Coefficients of u(t, .) itself; their moduli equal those of u0.
  CoeffVector coefficients() const {
    CoeffVector c(u0_.torus());
    for (const auto& m : modes_) c.set(m.k, m.amplitude);
    return c;
  }

  /// L^2_x mass over one period, via Parseval.
  double l2_mass() const { return coefficients().mass(); }

  double time() const { return t_; }

 private:
  struct Mode {
    std::int64_t k;
    cplx amplitude;
  };
  CoeffVector u0_;
  double t_;
  std::vector<Mode> modes_;
};

inline FlowEvaluator evolve(const CoeffVector& u0, double t) { return FlowEvaluator(u0, t); }

/// (linear sum, cubic sum) of an ordered frequency pair.
using PairKey = std::pair<std::int64_t, std::int64_t>;
using PairSpectrum = std::map<PairKey, cplx>;

/// Coefficients of u^2 keyed by (k_i + k_j, k_i^3 + k_j^3), summed over
/// ordered pairs (i, j).
inline PairSpectrum pair_spectrum(const CoeffVector& u) {
  if (u.empty()) throw std::invalid_argument("pair_spectrum needs a nonempty support");
  std::vector<std::pair<std::int64_t, cplx>> modes(u.begin(), u.end());
  for (const auto& [k, a] : modes) check_frequency(k);
  PairSpectrum out;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    for (std::size_t j = i; j < modes.size(); ++j) {
      const auto [ki, ai] = modes[i];
      const auto [kj, aj] = modes[j];
      const cplx w = (i == j ? 1.0 : 2.0) * ai * aj;
      out[{ki + kj, cube(ki) + cube(kj)}] += w;
    }
  }
  return out;
}

/// xi1^3 - (xi1-xi2)^3 + (xi3-xi2+xi4)^3 - xi3^3
///   == xi4^3 + 3 xi4 (xi3 (xi3 - 2 xi2 + xi4) + xi2 (xi2 - xi4)) + 3 xi2 (xi1 - xi3)(xi1 + xi3 - xi2)
inline bool cubic_identity_check(std::int64_t x1, std::int64_t x2, std::int64_t x3, std::int64_t x4) {
  for (auto v : {x1, x2, x3, x4}) check_frequency(v);
  using i128 = __int128;
  auto c3 = [](i128 v) { return v * v * v; };
  const i128 a = x1, b = x2, c = x3, d = x4;
  const i128 lhs = c3(a) - c3(a - b) + c3(c - b + d) - c3(c);
  const i128 rhs = c3(d) + 3 * d * (c * (c - 2 * b + d) + b * (b - d)) + 3 * b * (a - c) * (a + c - b);
  return lhs == rhs;
}

/// Roots alpha, beta of tau - 4 pi^2 (xi1^3 - (xi1 - xi)^3) as a quadratic in
/// xi1, stored as center xi/2 plus offset so that alpha + beta == xi exactly.
struct ResonanceRoots {
  double center = 0.0;
  cplx offset{};

  cplx alpha() const { return center + offset; }
  cplx beta() const { return center - offset; }
  /// alpha + beta evaluated in the stored representation.
  double sum() const { return 2.0 * center; }
};

inline ResonanceRoots resonance_roots(double tau, double xi) {
  if (xi == 0.0) throw std::domain_error("resonance_roots: xi must be nonzero");
  // tau - 4 pi^2 (3 xi xi1^2 - 3 xi^2 xi1 + xi^3) = -12 pi^2 xi (xi1^2 - xi xi1 + xi^2/3 - tau/(12 pi^2 xi))
  const double disc = tau / (12.0 * kPi * kPi * xi) - xi * xi / 12.0;
  ResonanceRoots r;
  r.center = xi / 2.0;
  if (disc >= 0.0) {
    const double d = std::sqrt(disc);
    r.offset = cplx(r.center >= 0.0 ? d : -d, 0.0);
  } else {
    r.offset = cplx(0.0, std::sqrt(-disc));
  }
  return r;
}

/// Drops the zero frequency (mean-zero projection).
inline CoeffVector project_mean_zero(const CoeffVector& u) {
  CoeffVector out = u;
  out.set(0, cplx{});
  return out;
}

// JSON: {"lambda": L, "coefficients": [{"k": k, "re": x, "im": y}, ...]}

inline nlohmann::json to_json(const CoeffVector& u) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [k, a] : u) arr.push_back({{"k", k}, {"re", a.real()}, {"im", a.imag()}});
  return {{"lambda", u.lambda()}, {"coefficients", std::move(arr)}};
}

inline CoeffVector coeffs_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("lambda") || !j.contains("coefficients"))
    throw std::invalid_argument("coefficient JSON needs \"lambda\" and \"coefficients\"");
  if (!j.at("lambda").is_number_integer()) throw std::invalid_argument("\"lambda\" must be an integer");
  CoeffVector u(TorusSpec(j.at("lambda").get<std::int64_t>()));
  const auto& arr = j.at("coefficients");
  if (!arr.is_array()) throw std::invalid_argument("\"coefficients\" must be an array");
  for (const auto& rec : arr) {
    if (!rec.contains("k") || !rec.at("k").is_number_integer())
      throw std::invalid_argument("coefficient record needs an integer \"k\"");
    const double re = rec.value("re", 0.0), im = rec.value("im", 0.0);
    const std::int64_t k = rec.at("k").get<std::int64_t>();
    u.set(k, u[k] + cplx(re, im));
  }
  return u;
}

/// Unit amplitudes on a dyadic annulus.
inline CoeffVector flat_block(const DyadicBlock& block, const TorusSpec& torus, cplx amplitude = 1.0) {
  CoeffVector u(torus);
  for (std::int64_t k : block.numerators(torus)) u.set(k, amplitude);
  return u;
}

}  // namespace strichartz::lattice

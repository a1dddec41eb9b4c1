#pragma once

// Smooth bump profiles: the standard mollifier, mollified plateaus (eta in
// time, phi for the major-arc bump), and tabulated Fourier transforms.
//
// Transform convention: F f(nu) = int f(t) e^{-2 pi i nu t} dt.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "strichartz/common.hpp"
#include "strichartz/fft.hpp"

namespace strichartz::profiles {

using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;

/// exp(-1/(1-s^2)) on (-1, 1), unnormalized.
inline double mollifier_raw(double s) {
  const double d = 1.0 - s * s;
  return d <= 0.0 ? 0.0 : std::exp(-1.0 / d);
}

namespace detail {

inline constexpr double kCdfStep = 1.0 / 4096.0;
inline constexpr double kRhoHatSampleStep = 1.0 / 8192.0;
inline constexpr double kRhoHatPeriod = 256.0;
inline constexpr double kRhoHatMax = 256.0;

struct CdfTable {
  double mass = 0.0;
  std::unique_ptr<Spline> spline;

  CdfTable() {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    const std::size_t cells = static_cast<std::size_t>(std::llround(2.0 / kCdfStep));
    std::vector<double> cum(cells + 1, 0.0);
    CompensatedSum<double> acc;
    for (std::size_t i = 0; i < cells; ++i) {
      const double a = -1.0 + static_cast<double>(i) * kCdfStep;
      acc.add(GK::integrate(mollifier_raw, a, a + kCdfStep, 0));
      cum[i + 1] = acc.value();
    }
    mass = cum.back();
    for (double& v : cum) v /= mass;
    spline = std::make_unique<Spline>(cum.begin(), cum.end(), -1.0, kCdfStep, 0.0, 0.0);
  }
};

inline const CdfTable& cdf_table() {
  static const CdfTable t;
  return t;
}

}  // namespace detail

/// Normalized mollifier rho with int rho = 1.
inline double mollifier(double s) { return mollifier_raw(s) / detail::cdf_table().mass; }

/// G(x) = int_{-1}^{x} rho.
inline double mollifier_cdf(double x) {
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return std::clamp((*detail::cdf_table().spline)(x), 0.0, 1.0);
}

/// Tabulated rho-hat on [0, kRhoHatMax] with step 1/kRhoHatPeriod. Beyond the
/// table rho-hat is below 1e-24 and is returned as 0.
class RhoHatTable {
 public:
  static constexpr std::uint32_t kVersion = 1;

  RhoHatTable() { build(); }

  /// Loads `path` if it holds a compatible table, otherwise builds and writes it.
  static RhoHatTable load_or_build(const std::filesystem::path& path, double tolerance) {
    RhoHatTable t(nullptr);
    if (t.load(path, tolerance)) return t;
    t.build();
    t.save(path);
    return t;
  }

  double operator()(double nu) const {
    nu = std::abs(nu);
    if (nu >= detail::kRhoHatMax) return 0.0;
    return (*spline_)(nu);
  }

  double step() const { return 1.0 / detail::kRhoHatPeriod; }
  double tolerance() const { return tolerance_; }
  const std::vector<double>& values() const { return values_; }

  void save(const std::filesystem::path& path) const {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const auto tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write transform cache " + tmp);
      const double st = step();
      out.write(reinterpret_cast<const char*>(&kVersion), sizeof kVersion);
      out.write(reinterpret_cast<const char*>(&tolerance_), sizeof tolerance_);
      out.write(reinterpret_cast<const char*>(&st), sizeof st);
      out.write(reinterpret_cast<const char*>(values_.data()), static_cast<std::streamsize>(values_.size() * sizeof(double)));
    }
    std::filesystem::rename(tmp, path);
  }

  bool load(const std::filesystem::path& path, double tolerance) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::uint32_t version = 0;
    double tol = 0.0, st = 0.0;
    in.read(reinterpret_cast<char*>(&version), sizeof version);
    in.read(reinterpret_cast<char*>(&tol), sizeof tol);
    in.read(reinterpret_cast<char*>(&st), sizeof st);
    if (!in || version != kVersion || tol > tolerance || st != step()) return false;
    const std::size_t n = node_count();
    std::vector<double> v(n);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(n * sizeof(double))) return false;
    values_ = std::move(v);
    tolerance_ = tol;
    make_spline();
    return spot_check_error() <= tolerance_;
  }

  /// Largest deviation from adaptive Gauss-Kronrod quadrature at fixed spot checks.
  double spot_check_error() const {
    double worst = 0.0;
    for (double nu : {0.0, 0.3, 1.7, 4.25, 9.8, 23.5}) worst = std::max(worst, std::abs((*this)(nu) - direct(nu)));
    return worst;
  }

  /// rho-hat(nu) by adaptive quadrature.
  static double direct(double nu) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    auto f = [nu](double s) { return mollifier(s) * std::cos(kTwoPi * nu * s); };
    return 2.0 * GK::integrate(f, 0.0, 1.0, 10, 1e-12);
  }

 private:
  explicit RhoHatTable(std::nullptr_t) {}

  static std::size_t node_count() {
    return static_cast<std::size_t>(std::llround(detail::kRhoHatMax * detail::kRhoHatPeriod)) + 1;
  }

  void build() {
    // Trapezoid sums of rho over one padded period, evaluated for all
    // frequencies m / P at once by a single DFT.
    const double h = detail::kRhoHatSampleStep;
    const std::size_t n = static_cast<std::size_t>(std::llround(detail::kRhoHatPeriod / h));
    const std::size_t half = static_cast<std::size_t>(std::llround(1.0 / h));
    FftPlan plan(n, FFTW_FORWARD);
    plan.zero();
    for (std::size_t j = 0; j <= half; ++j) {
      const double v = mollifier(static_cast<double>(j) * h) * h;
      plan[j] = v;
      if (j > 0) plan[n - j] = v;
    }
    plan.execute();
    values_.resize(node_count());
    for (std::size_t m = 0; m < values_.size(); ++m) values_[m] = plan[m].real();
    tolerance_ = 1e-10;
    make_spline();
  }

  void make_spline() {
    spline_ = std::make_shared<Spline>(values_.begin(), values_.end(), 0.0, step(), 0.0, 0.0);
  }

  std::vector<double> values_;
  double tolerance_ = 0.0;
  std::shared_ptr<Spline> spline_;
};

inline const RhoHatTable& rho_hat_table() {
  static const RhoHatTable t;
  return t;
}

/// Indicator of [c-h, c+h] convolved with the mollifier of radius r.
/// Support [c-h-r, c+h+r]; equal to 1 on [c-h+r, c+h-r].
struct MollifiedPlateau {
  double center = 0.0;
  double half_width = 0.75;
  double radius = 0.25;

  double operator()(double t) const {
    return mollifier_cdf((t - center + half_width) / radius) - mollifier_cdf((t - center - half_width) / radius);
  }

  double support_lo() const { return center - half_width - radius; }
  double support_hi() const { return center + half_width + radius; }
  double plateau_lo() const { return center - half_width + radius; }
  double plateau_hi() const { return center + half_width - radius; }

  /// Fourier transform e^{-2 pi i nu c} sin(2 pi nu h)/(pi nu) rho-hat(r nu).
  cplx transform(double nu, const RhoHatTable& rho = rho_hat_table()) const {
    const double box = nu == 0.0 ? 2.0 * half_width : std::sin(kTwoPi * nu * half_width) / (kPi * nu);
    return unit_phase(-nu * center) * (box * rho(radius * nu));
  }

  double integral() const { return 2.0 * half_width; }

  std::string id() const {
    return "mollified-plateau(center=" + std::to_string(center) + ",half_width=" + std::to_string(half_width) +
           ",radius=" + std::to_string(radius) + ")";
  }
};

/// Time cutoff: support [-1, 1], equal to 1 on [-1/2, 1/2].
inline MollifiedPlateau eta() { return {0.0, 0.75, 0.25}; }

/// Major-arc bump: support [0, 0.03] inside [0, 1], equal to 1 on [0.01, 0.02].
inline MollifiedPlateau phi_bump() { return {0.015, 0.01, 0.005}; }

/// F(eta^4), tabulated on [0, 1024] with step 1/256 by a padded-period DFT of
/// eta^4 sampled at step 2^-11. Beyond the table it is returned as 0.
class EtaFourthTransform {
 public:
  static constexpr double kSampleStep = 1.0 / 2048.0;
  static constexpr double kPeriod = 256.0;
  static constexpr double kMax = 1024.0;

  EtaFourthTransform() {
    const MollifiedPlateau e = eta();
    const std::size_t n = static_cast<std::size_t>(std::llround(kPeriod / kSampleStep));
    const std::size_t half = static_cast<std::size_t>(std::llround(1.0 / kSampleStep));
    FftPlan plan(n, FFTW_FORWARD);
    plan.zero();
    for (std::size_t j = 0; j <= half; ++j) {
      const double v = std::pow(e(static_cast<double>(j) * kSampleStep), 4) * kSampleStep;
      plan[j] = v;
      if (j > 0) plan[n - j] = v;
    }
    plan.execute();
    const std::size_t nodes = static_cast<std::size_t>(std::llround(kMax * kPeriod)) + 1;
    values_.resize(nodes);
    for (std::size_t m = 0; m < nodes; ++m) values_[m] = plan[m].real();
    spline_ = std::make_unique<Spline>(values_.begin(), values_.end(), 0.0, 1.0 / kPeriod, 0.0, 0.0);
  }

  double operator()(double nu) const {
    nu = std::abs(nu);
    if (nu >= kMax) return 0.0;
    return (*spline_)(nu);
  }

  /// int eta^4.
  double integral() const { return values_[0]; }

  static double direct(double nu) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    const MollifiedPlateau e = eta();
    auto f = [&](double t) { return std::pow(e(t), 4) * std::cos(kTwoPi * nu * t); };
    return 2.0 * GK::integrate(f, 0.0, 1.0, 10, 1e-12);
  }

 private:
  std::vector<double> values_;
  std::unique_ptr<Spline> spline_;
};

inline const EtaFourthTransform& eta4_transform() {
  static const EtaFourthTransform t;
  return t;
}

/// eta-tilde(t) = int e^{2 pi i t tau} |eta-hat(tau)| d tau, tabulated on [-8, 8].
class EtaTilde {
 public:
  static constexpr double kTauStep = 1.0 / 256.0;
  static constexpr double kTauMax = 512.0;
  static constexpr double kTMax = 8.0;

  EtaTilde() {
    const MollifiedPlateau e = eta();
    const std::size_t n = static_cast<std::size_t>(std::llround(2.0 * kTauMax / kTauStep));
    FftPlan plan(n, FFTW_BACKWARD);
    plan.zero();
    for (std::size_t m = 0; m < n / 2; ++m) {
      const double v = std::abs(e.transform(static_cast<double>(m) * kTauStep)) * kTauStep;
      plan[m] = v;
      if (m > 0) plan[n - m] = v;
    }
    plan.execute();
    // Output j sits at t = j / (n * kTauStep).
    const double dt = 1.0 / (static_cast<double>(n) * kTauStep);
    const std::size_t keep = static_cast<std::size_t>(std::llround(kTMax / dt));
    std::vector<double> v(2 * keep + 1);
    for (std::size_t j = 0; j <= keep; ++j) {
      v[keep + j] = plan[j].real();
      v[keep - j] = plan[j].real();
    }
    spline_ = std::make_unique<Spline>(v.begin(), v.end(), -kTMax, dt);
    peak_ = plan[0].real();
  }

  double operator()(double t) const {
    if (std::abs(t) > kTMax) throw std::domain_error("eta_tilde tabulated only on [-8, 8]");
    return (*spline_)(t);
  }

  /// eta-tilde(0) = int |eta-hat| = max |eta-tilde|.
  double peak() const { return peak_; }

 private:
  std::unique_ptr<Spline> spline_;
  double peak_ = 0.0;
};

inline const EtaTilde& eta_tilde() {
  static const EtaTilde t;
  return t;
}

}  // namespace strichartz::profiles

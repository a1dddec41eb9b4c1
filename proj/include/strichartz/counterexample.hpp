#pragma once

// Flat annulus data phi_N, the growth of its L^8 ratio, and the resonance
// sets M(alpha, xi4) behind the lower bound.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "strichartz/common.hpp"
#include "strichartz/counting.hpp"
#include "strichartz/fit.hpp"
#include "strichartz/lattice.hpp"
#include "strichartz/norms.hpp"

namespace strichartz::counterexample {

using lattice::CoeffVector;

/// Unit amplitudes on N <= |xi| < 2N over T, read as sum e^{2 pi i xi x}.
inline CoeffVector build_phi_N(std::int64_t N) {
  return lattice::flat_block(lattice::DyadicBlock(N), lattice::TorusSpec(1));
}

struct RatioRow {
  std::int64_t N = 0;
  double l8_eighth_power = 0.0;  ///< ||u_N||_8^8
  double ratio = 0.0;            ///< divided by ||phi_N||_2^8 = (2N)^4
};

struct RatioSweep {
  std::vector<RatioRow> rows;
  LinearFit fit;  ///< ratio = slope log N + intercept
};

inline constexpr std::int64_t kMaxSweepN = 256;

inline RatioRow l8_ratio(std::int64_t N, unsigned shards = 1) {
  require_dyadic(N, "N");
  if (N > kMaxSweepN) throw guard_error("l8_ratio: N above the exact-mode limit 256");
  const auto u = build_phi_N(N);
  const double power = counting::lp_power(counting::singles<double>(u), 8, shards);
  return {N, power, power / std::pow(2.0 * static_cast<double>(N), 4)};
}

inline RatioSweep l8_ratio_sweep(const std::vector<std::int64_t>& Ns, unsigned shards = 1) {
  RatioSweep s;
  std::vector<double> x, y;
  for (auto N : Ns) {
    s.rows.push_back(l8_ratio(N, shards));
    x.push_back(std::log(static_cast<double>(N)));
    y.push_back(s.rows.back().ratio);
  }
  if (Ns.size() >= 2) s.fit = linear_fit(x, y);
  return s;
}

struct MSetSpec {
  std::int64_t alpha = 1;
  std::int64_t xi4 = 0;
  std::int64_t N = 1;
};

inline constexpr std::int64_t kMaxMSetN = 128;

/// Bin width <xi4> N^2 of M(alpha, xi4).
inline double m_set_width(std::int64_t xi4, std::int64_t N) {
  return japanese(static_cast<double>(xi4)) * static_cast<double>(N) * static_cast<double>(N);
}

/// The alpha >= 1 with (alpha-1) w <= R < alpha w, using the same floating
/// expressions as the membership test.
inline std::int64_t m_set_alpha(std::int64_t R, double w) {
  const double r = static_cast<double>(R);
  auto a = static_cast<std::int64_t>(std::floor(r / w)) + 1;
  while (a > 1 && static_cast<double>(a - 1) * w > r) --a;
  while (r >= static_cast<double>(a) * w) ++a;
  return a;
}

inline std::int64_t resonance(std::int64_t x1, std::int64_t x2, std::int64_t x3) {
  const std::int64_t r = x2 * (x1 - x3) * (x1 + x3 - x2);
  return r < 0 ? -r : r;
}

/// Histogram alpha -> #{(xi1, xi2, xi3) : |xi1|, |xi1-xi2|, |xi3-xi2+xi4|, |xi3| <= N} by bin.
inline std::map<std::int64_t, std::int64_t> m_set_histogram(std::int64_t xi4, std::int64_t N, unsigned shards = 1) {
  require_dyadic(N, "N");
  if (N > kMaxMSetN) throw guard_error("m_set_count: N above the enumeration limit 128");
  const double w = m_set_width(xi4, N);
  const std::size_t rows = static_cast<std::size_t>(2 * N + 1);
  std::vector<std::map<std::int64_t, std::int64_t>> part(rows);
  parallel_for(rows, shards, [&](std::size_t i) {
    const std::int64_t x1 = -N + static_cast<std::int64_t>(i);
    auto& h = part[i];
    for (std::int64_t x3 = -N; x3 <= N; ++x3) {
      const std::int64_t lo = std::max(x1 - N, x3 + xi4 - N), hi = std::min(x1 + N, x3 + xi4 + N);
      for (std::int64_t x2 = lo; x2 <= hi; ++x2) ++h[m_set_alpha(resonance(x1, x2, x3), w)];
    }
  });
  std::map<std::int64_t, std::int64_t> out;
  for (const auto& h : part)
    for (const auto& [a, c] : h) out[a] += c;
  return out;
}

/// |M(alpha, xi4)| restricted to the four indicator constraints.
inline std::int64_t m_set_count(const MSetSpec& spec, unsigned shards = 1) {
  if (spec.alpha < 1) throw std::invalid_argument("alpha must be >= 1");
  const auto h = m_set_histogram(spec.xi4, spec.N, shards);
  auto it = h.find(spec.alpha);
  return it == h.end() ? 0 : it->second;
}

/// Number of triples satisfying the indicator constraints, without binning.
inline std::int64_t admissible_triples(std::int64_t xi4, std::int64_t N) {
  std::int64_t n = 0;
  for (std::int64_t x1 = -N; x1 <= N; ++x1)
    for (std::int64_t x3 = -N; x3 <= N; ++x3) {
      const std::int64_t lo = std::max(x1 - N, x3 + xi4 - N), hi = std::min(x1 + N, x3 + xi4 + N);
      if (hi >= lo) n += hi - lo + 1;
    }
  return n;
}

/// Witness subfamily N/16 <= xi3 < N/8, N/4 <= xi2 < 3N/4 of the admissible
/// triples, histogrammed by alpha.
inline std::map<std::int64_t, std::int64_t> m_set_witness_histogram(std::int64_t xi4, std::int64_t N) {
  require_dyadic(N, "N");
  if (N > kMaxMSetN) throw guard_error("m_set_witness_count: N above the enumeration limit 128");
  const double w = m_set_width(xi4, N);
  std::map<std::int64_t, std::int64_t> h;
  for (std::int64_t x3 = 0; 16 * x3 < 2 * N; ++x3) {
    if (16 * x3 < N) continue;
    for (std::int64_t x2 = 0; 4 * x2 < 3 * N; ++x2) {
      if (4 * x2 < N) continue;
      if (std::abs(x3 - x2 + xi4) > N) continue;
      for (std::int64_t x1 = std::max(-N, x2 - N); x1 <= std::min(N, x2 + N); ++x1) ++h[m_set_alpha(resonance(x1, x2, x3), w)];
    }
  }
  return h;
}

inline std::int64_t m_set_witness_count(const MSetSpec& spec) {
  const auto h = m_set_witness_histogram(spec.xi4, spec.N);
  auto it = h.find(spec.alpha);
  return it == h.end() ? 0 : it->second;
}

/// Lower-bound shape N^2 sqrt(alpha <xi4> N).
inline double m_set_shape(const MSetSpec& s) {
  const double N = static_cast<double>(s.N);
  return N * N * std::sqrt(static_cast<double>(s.alpha) * japanese(static_cast<double>(s.xi4)) * N);
}

struct GroupedCheck {
  double generic = 0.0;        ///< ||u_N||_8^8 from the counting engine
  double grouped = 0.0;        ///< xi4-grouped representation
  double permuted = 0.0;       ///< same grouping with the permuted phase of the later display
  double relative_difference = 0.0;
};

/// ||u_N||_8^8 = ||(|u|^4)||_2^2 written as sum over the spatial frequency xi4
/// of the time-integral of the squared inner sum; each inner sum is grouped by
/// its cubic phase.
inline GroupedCheck grouped_l8_check(std::int64_t N) {
  require_dyadic(N, "N");
  if (N > 16) throw guard_error("grouped_l8_check: N above 16");
  const auto u = build_phi_N(N);
  std::vector<std::int64_t> supp;
  for (const auto& [k, a] : u) supp.push_back(k);
  // Quadruple (xi1, xi1 - xi2, xi3 - xi2 + xi4, xi3) of u, conj u, u, conj u frequencies.
  std::vector<std::pair<std::int64_t, std::int64_t>> keys, keys_perm;
  keys.reserve(supp.size() * supp.size() * supp.size() * supp.size());
  for (auto a : supp)
    for (auto b : supp)
      for (auto c : supp)
        for (auto d : supp) {
          const std::int64_t x1 = a, x2 = a - b, x3 = d, x4 = a - b + c - d;
          const std::int64_t phase = 3 * x4 * (x3 * (x3 - 2 * x2 + x4) + x2 * (x2 - x4)) + 3 * x2 * (x1 - x3) * (x1 + x3 - x2);
          const std::int64_t perm = 3 * (x4 * (x3 * (x3 - 2 * x1 + x4) + x1 * (x2 - x4)) + x1 * (x2 - x3) * (x2 + x3 - x1));
          keys.emplace_back(x4, phase);
          keys_perm.emplace_back(x4, perm);
        }
  auto sum_sq_counts = [](std::vector<std::pair<std::int64_t, std::int64_t>>& ks) {
    std::sort(ks.begin(), ks.end());
    double total = 0.0;
    for (std::size_t i = 0; i < ks.size();) {
      std::size_t j = i;
      while (j < ks.size() && ks[j] == ks[i]) ++j;
      const double c = static_cast<double>(j - i);
      total += c * c;
      i = j;
    }
    return total;
  };
  GroupedCheck g;
  g.grouped = sum_sq_counts(keys);
  g.permuted = sum_sq_counts(keys_perm);
  g.generic = counting::lp_power(counting::singles<double>(u), 8);
  g.relative_difference = std::abs(g.grouped - g.generic) / g.generic;
  return g;
}

}  // namespace strichartz::counterexample

#pragma once

// Bilinear L^4 scanner over dyadic (L, N, lambda) cells and the level-set
// interpolation chain for B = eta(t) (e^{tA} phi_L)(e^{tA} phi_N).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "strichartz/common.hpp"
#include "strichartz/fit.hpp"
#include "strichartz/lattice.hpp"
#include "strichartz/norms.hpp"

namespace strichartz::bilinear {

using lattice::CoeffVector;
using lattice::TorusSpec;

/// Fourth-power right-hand side
/// (1/lambda + 1/N^2) L^{3/4+eps} N^{3/4+eps} + min{N^{-(1-eps)}, 1/lambda + 1/N^2} L N.
inline double rhs_theorem2(std::int64_t L, std::int64_t N, std::int64_t lambda, double eps) {
  if (L < 1 || lambda < 1) throw std::invalid_argument("rhs_theorem2: L and lambda must be >= 1");
  if (N < L) throw std::invalid_argument("rhs_theorem2: requires N >= L");
  const double l = static_cast<double>(L), n = static_cast<double>(N);
  const double small = 1.0 / static_cast<double>(lambda) + 1.0 / (n * n);
  return small * std::pow(l, 0.75 + eps) * std::pow(n, 0.75 + eps) + std::min(std::pow(n, -(1.0 - eps)), small) * l * n;
}

enum class DataKind { flat, random };

inline std::string to_string(DataKind k) { return k == DataKind::flat ? "flat" : "random"; }

inline DataKind data_kind_from_string(const std::string& s) {
  if (s == "flat") return DataKind::flat;
  if (s == "random") return DataKind::random;
  throw std::invalid_argument("unknown data kind '" + s + "' (expected flat or random)");
}

/// Unit-mass data on the block |k / lambda| in [B, 2B): equal amplitudes, or
/// complex Gaussian amplitudes drawn from `seed`.
inline CoeffVector block_data(std::int64_t B, const TorusSpec& torus, DataKind kind, const SeedTree& seed) {
  if (kind == DataKind::flat) return lattice::flat_block(lattice::DyadicBlock(B), torus).normalized();
  CoeffVector u(torus);
  auto rng = seed.engine();
  std::normal_distribution<double> g(0.0, 1.0);
  for (auto k : lattice::DyadicBlock(B).numerators(torus)) {
    const double re = g(rng), im = g(rng);
    u.set(k, cplx(re, im));
  }
  return u.normalized();
}

struct ScanCell {
  std::int64_t L = 1, N = 1, lambda = 1;
  DataKind kind = DataKind::flat;
  int seed_index = 0;  ///< 0 for flat, 1.. for random draws
  norms::NormResult lhs;
  double rhs = 0.0;
  double ratio = 0.0;  ///< lhs.value^4 / rhs
  std::string skipped;  ///< nonempty when a cost guard tripped
  double lhs4() const { return std::pow(lhs.value, 4); }
};

struct ScanConfig {
  std::vector<std::int64_t> Ls{1, 2, 4};
  std::vector<std::int64_t> Ns{4, 8, 16};
  std::vector<std::int64_t> lambdas{1, 4, 16};
  std::vector<DataKind> kinds{DataKind::flat};
  int random_draws = 5;  ///< draws per cell when kinds contains random
  double eps = 0.05;
  norms::BilinearOptions bilinear;
  std::uint64_t seed = 0;
  unsigned shards = 1;
};

/// Data seeds depend on (L, N, lambda, kind, draw) only, so cells are reproducible
/// independently of the grid they are embedded in.
inline ScanCell scan_cell(std::int64_t L, std::int64_t N, std::int64_t lambda, DataKind kind, int draw, const ScanConfig& cfg) {
  ScanCell c;
  c.L = L, c.N = N, c.lambda = lambda, c.kind = kind, c.seed_index = draw;
  c.rhs = rhs_theorem2(L, N, lambda, cfg.eps);
  const TorusSpec torus(lambda);
  const SeedTree cell = SeedTree(cfg.seed)
                            .derive("scan")
                            .derive(static_cast<std::uint64_t>(L))
                            .derive(static_cast<std::uint64_t>(N))
                            .derive(static_cast<std::uint64_t>(lambda))
                            .derive(static_cast<std::uint64_t>(draw));
  try {
    const auto uL = block_data(L, torus, kind, cell.derive("L"));
    const auto uN = block_data(N, torus, kind, cell.derive("N"));
    auto opt = cfg.bilinear;
    opt.seed = cell.derive("sampling").value();
    c.lhs = norms::bilinear_l4(uL, uN, torus, norms::default_eta(), opt);
    c.ratio = c.lhs4() / c.rhs;
  } catch (const guard_error& e) {
    c.skipped = e.what();
  }
  return c;
}

/// Cells in (L, N, lambda, kind, draw) order; N < L pairs are omitted.
inline std::vector<ScanCell> scan(const ScanConfig& cfg) {
  struct Job {
    std::int64_t L, N, lambda;
    DataKind kind;
    int draw;
  };
  std::vector<Job> jobs;
  for (auto L : cfg.Ls) {
    require_dyadic(L, "L");
    for (auto N : cfg.Ns) {
      require_dyadic(N, "N");
      if (N < L) continue;
      for (auto lam : cfg.lambdas)
        for (auto kind : cfg.kinds) {
          const int draws = kind == DataKind::flat ? 1 : cfg.random_draws;
          for (int d = 0; d < draws; ++d) jobs.push_back({L, N, lam, kind, kind == DataKind::flat ? 0 : d + 1});
        }
    }
  }
  std::vector<ScanCell> cells(jobs.size());
  parallel_for(jobs.size(), cfg.shards, [&](std::size_t i) {
    const auto& j = jobs[i];
    cells[i] = scan_cell(j.L, j.N, j.lambda, j.kind, j.draw, cfg);
  });
  return cells;
}

/// Largest ratio over cells that were evaluated.
inline double empirical_constant(const std::vector<ScanCell>& cells) {
  double c = 0.0;
  for (const auto& cell : cells)
    if (cell.skipped.empty()) c = std::max(c, cell.ratio);
  return c;
}

struct StabilityReport {
  double c_base = 0.0;
  double c_doubled = 0.0;
  double relative_change = 0.0;
};

/// C* at the configured time sampling and at twice as many time nodes.
inline StabilityReport constant_stability(const ScanConfig& cfg) {
  StabilityReport r;
  r.c_base = empirical_constant(scan(cfg));
  ScanConfig doubled = cfg;
  doubled.bilinear.sampling.t_samples *= 2;
  r.c_doubled = empirical_constant(scan(doubled));
  r.relative_change = std::abs(r.c_doubled - r.c_base) / r.c_base;
  return r;
}

struct LevelSetReport {
  std::int64_t L = 1, N = 1, lambda = 1;
  norms::LevelSetTable table;
  double sup_bound = 0.0;            ///< Cauchy-Schwarz sup of |B|
  double literal_threshold = 0.0;    ///< sqrt(L N) sqrt(mass_L mass_N)
  double measure_above_bound = 0.0;  ///< |E_mu| just above sup_bound
  double direct_l4_power = 0.0;      ///< ||B||_4^4 from bilinear_l4
  double layer_cake_l4_power = 0.0;
  double layer_cake_vs_grid = 0.0;    ///< relative difference against the grid sum
  double layer_cake_vs_direct = 0.0;  ///< relative difference against bilinear_l4
  double smallness = 0.0;             ///< 1/lambda + 1/N^2
  double max_mu2_measure = 0.0;       ///< max over the mu-grid of mu^2 |E_mu|
  double mu2_ratio = 0.0;             ///< max_mu2_measure / smallness
  double cutoff = 0.0;                ///< mu_0 = L^{3/8+eps/2} N^{3/8+eps/2}
  double low_part = 0.0;              ///< 4 int_0^{mu_0} mu^3 |E_mu|
  double high_part = 0.0;             ///< 4 int_{mu_0} mu^3 |E_mu|
};

/// Level-set chain on a T x X grid for given block data.
inline LevelSetReport levelset_chain_check(const CoeffVector& uL, const CoeffVector& uN, std::int64_t L, std::int64_t N,
                                           std::size_t T = 512, std::size_t X = 512, double eps = 0.05,
                                           const norms::BilinearOptions& opt = {}) {
  const TorusSpec torus = uL.torus();
  LevelSetReport r;
  r.L = L, r.N = N, r.lambda = torus.lambda;
  // Dense thresholds so the trapezoid in mu^4 is accurate.
  auto field = norms::bilinear_field(uL, uN);
  auto coarse = norms::superlevel_measure(field, torus, T, X);
  std::vector<double> th;
  const double top = coarse.sampled_sup;
  for (int i = 0; i < 512; ++i) th.push_back(top * std::pow(10.0, -4.0 + 4.0 * i / 511.0));
  r.table = norms::superlevel_measure(field, torus, T, X, th);
  r.sup_bound = norms::bilinear_sup_bound(uL, uN);
  r.literal_threshold = std::sqrt(static_cast<double>(L * N) * uL.mass() * uN.mass());
  r.measure_above_bound = r.table.measure_above(r.sup_bound * (1.0 + 1e-12));
  r.direct_l4_power = std::pow(norms::bilinear_l4(uL, uN, torus, norms::default_eta(), opt).value, 4);
  r.layer_cake_l4_power = r.table.layer_cake_l4_power();
  r.layer_cake_vs_grid = std::abs(r.layer_cake_l4_power - r.table.sampled_l4_power) / r.table.sampled_l4_power;
  r.layer_cake_vs_direct = std::abs(r.layer_cake_l4_power - r.direct_l4_power) / r.direct_l4_power;
  r.smallness = 1.0 / static_cast<double>(torus.lambda) + 1.0 / (static_cast<double>(N) * static_cast<double>(N));
  for (std::size_t i = 0; i < r.table.thresholds.size(); ++i)
    r.max_mu2_measure = std::max(r.max_mu2_measure, r.table.thresholds[i] * r.table.thresholds[i] * r.table.measures[i]);
  r.mu2_ratio = r.max_mu2_measure / r.smallness;
  r.cutoff = std::pow(static_cast<double>(L) * static_cast<double>(N), 0.375 + eps / 2.0);
  // Split of the layer-cake integral at the cutoff.
  CompensatedSum<double> lo, hi;
  const auto& t = r.table.thresholds;
  const auto& m = r.table.measures;
  if (!t.empty()) {
    (t.front() < r.cutoff ? lo : hi).add(std::pow(t.front(), 4) * m.front());
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
      const double piece = (std::pow(t[i + 1], 4) - std::pow(t[i], 4)) * 0.5 * (m[i] + m[i + 1]);
      (t[i + 1] <= r.cutoff ? lo : hi).add(piece);
    }
  }
  r.low_part = lo.value();
  r.high_part = hi.value();
  return r;
}

}  // namespace strichartz::bilinear

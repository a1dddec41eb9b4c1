// Acceptance run: one PASS/FAIL line per criterion, followed by indented info
// lines. Exit status is nonzero when a criterion fails unexpectedly or an
// expected failure passes.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "strichartz/strichartz.hpp"

using namespace strichartz;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  std::vector<std::string> info;
};

struct Criterion {
  int id;
  std::string title;
  double limit_seconds;
  std::function<Outcome(unsigned)> run;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string g(double v) { return fmt("%.6g", v); }

lattice::CoeffVector random_vector(std::mt19937_64& rng, std::size_t M, std::int64_t K) {
  std::uniform_int_distribution<std::int64_t> k(-K, K);
  std::normal_distribution<double> n;
  std::set<std::int64_t> supp;
  while (supp.size() < M) supp.insert(k(rng));
  lattice::CoeffVector u(lattice::TorusSpec(1));
  for (auto x : supp) {
    const double re = n(rng), im = n(rng);
    u.set(x, cplx(re, im));
  }
  return u;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

Outcome c1_exact_oracle(unsigned shards) {
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<std::size_t> m(1, 20);
  double worst_closed = 0.0, worst_grid = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto u = random_vector(rng, m(rng), 12);
    const double exact = norms::lp_exact_torus(u, 4, shards).power();
    worst_closed = std::max(worst_closed, rel(exact, norms::l4_closed_form(u)));
    worst_grid = std::max(worst_grid, rel(exact, oracle::grid_lp_power(u, 4)));
  }
  Outcome o;
  o.pass = worst_closed <= 1e-8 && worst_grid <= 1e-8;
  o.detail = "50 vectors, max rel err vs closed form " + g(worst_closed) + ", vs quadrature " + g(worst_grid) + " (tol 1e-8)";
  return o;
}

Outcome c2_closed_forms(unsigned shards) {
  const lattice::TorusSpec t1(1);
  const auto u1 = lattice::flat_block(lattice::DyadicBlock(1), t1);
  const double p4 = norms::lp_exact_torus(u1, 4, shards).power(), p8 = norms::lp_exact_torus(u1, 8, shards).power();
  Outcome o;
  o.pass = rel(p4, 6.0) <= 1e-12 && rel(p8, 70.0) <= 1e-12;
  double worst = 0.0;
  for (std::int64_t N : {1, 2, 4, 8}) {
    const auto u = lattice::flat_block(lattice::DyadicBlock(N), t1);
    std::vector<std::int64_t> s;
    for (const auto& [k, a] : u) s.push_back(k);
    const double law = 12.0 * N * N - 6.0 * N;
    const double brute = static_cast<double>(oracle::quadruple_count(s));
    const double exact = norms::lp_exact_torus(u, 4, shards).power();
    worst = std::max({worst, rel(brute, law), rel(exact, law)});
    if (N <= 4) worst = std::max(worst, rel(oracle::grid_lp_power(u, 4), law));
  }
  o.pass = o.pass && worst <= 1e-12;
  o.detail = "N=1: ||u||_4^4 = " + fmt("%.15g", p4) + ", ||u||_8^8 = " + fmt("%.15g", p8) + "; 12N^2-6N law max rel err " + g(worst);
  return o;
}

Outcome c3_l8_growth(unsigned shards) {
  const auto sweep = counterexample::l8_ratio_sweep(dyadic_range(4, 256), shards);
  Outcome o;
  o.pass = sweep.fit.slope > 0.0 && sweep.fit.r2 >= 0.9 && sweep.rows.size() == 7;
  o.detail = "r(N) = a log N + b over N=4..256: a = " + g(sweep.fit.slope) + ", R^2 = " + g(sweep.fit.r2);
  std::string rs;
  for (const auto& r : sweep.rows) rs += " " + std::to_string(r.N) + ":" + g(r.ratio);
  o.info.push_back("r(N):" + rs);
  return o;
}

Outcome c4_m_set(unsigned shards) {
  using counterexample::MSetSpec;
  std::int64_t cells = 0, zeros = 0, reduced_cells = 0, reduced_zeros = 0;
  double c = std::numeric_limits<double>::infinity(), c_reduced = c;
  std::string first_zero;
  for (std::int64_t N : {8, 16, 32, 64})
    for (std::int64_t xi4 = -N / 8; xi4 <= N / 8; ++xi4) {
      const auto h = counterexample::m_set_histogram(xi4, N, shards);
      const double jx = japanese(static_cast<double>(xi4));
      const auto amax = static_cast<std::int64_t>(std::floor(static_cast<double>(N) / jx));
      for (std::int64_t a = 1; a <= amax; ++a) {
        const auto it = h.find(a);
        const double count = it == h.end() ? 0.0 : static_cast<double>(it->second);
        const double ratio = count / counterexample::m_set_shape(MSetSpec{a, xi4, N});
        ++cells;
        c = std::min(c, ratio);
        if (count == 0.0) {
          ++zeros;
          if (first_zero.empty()) first_zero = "N=" + std::to_string(N) + " xi4=" + std::to_string(xi4) + " alpha=" + std::to_string(a);
        }
        if (4.0 * static_cast<double>(a) * jx <= static_cast<double>(N)) {
          ++reduced_cells;
          c_reduced = std::min(c_reduced, ratio);
          if (count == 0.0) ++reduced_zeros;
        }
      }
    }
  Outcome o;
  o.pass = c > 0.0 && zeros == 0;
  o.detail = "fitted c = " + g(c) + " over " + std::to_string(cells) + " cells; " + std::to_string(zeros) + " cells with empty M-set (violations for every c > 0)";
  if (!first_zero.empty()) o.info.push_back("first empty cell " + first_zero + "; the resonance |xi2(xi1-xi3)(xi1+xi3-xi2)| cannot reach alpha <xi4> N^2 there");
  o.info.push_back("restricted to alpha <= N/(4<xi4>): c = " + g(c_reduced) + " over " + std::to_string(reduced_cells) + " cells, " +
                   std::to_string(reduced_zeros) + " empty");
  return o;
}

Outcome c5_bilinear_sweep(unsigned shards) {
  bilinear::ScanConfig cfg;
  cfg.Ls = dyadic_range(1, 32);
  cfg.Ns = dyadic_range(1, 32);
  cfg.lambdas = {1, 2, 4, 8, 16};
  cfg.kinds = {bilinear::DataKind::flat, bilinear::DataKind::random};
  cfg.random_draws = 5;
  cfg.shards = shards;
  const auto cells = bilinear::scan(cfg);
  std::size_t skipped = 0, sampled = 0;
  const bilinear::ScanCell* arg = nullptr;
  for (const auto& c : cells) {
    if (!c.skipped.empty()) ++skipped;
    if (c.lhs.method == norms::Method::sampled) ++sampled;
    if (c.skipped.empty() && (!arg || c.ratio > arg->ratio)) arg = &c;
  }
  const double base = bilinear::empirical_constant(cells);
  auto doubled = cfg;
  doubled.bilinear.sampling.t_samples *= 2;
  const auto cells2 = bilinear::scan(doubled);
  const double twice = bilinear::empirical_constant(cells2);
  const double change = std::abs(twice - base) / base;
  double sampled_c = 0.0, sampled_c2 = 0.0, worst_cell = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].lhs.method != norms::Method::sampled || !cells[i].skipped.empty() || !cells2[i].skipped.empty()) continue;
    sampled_c = std::max(sampled_c, cells[i].ratio);
    sampled_c2 = std::max(sampled_c2, cells2[i].ratio);
    worst_cell = std::max(worst_cell, rel(cells2[i].ratio, cells[i].ratio));
  }
  Outcome o;
  o.pass = skipped == 0 && std::isfinite(base) && base > 0.0 && change <= 0.10;
  o.detail = "C* = " + g(base) + " over " + std::to_string(cells.size()) + " cells, doubled time sampling C* = " + g(twice) + " (change " +
             g(change) + ", tol 0.10)";
  if (arg)
    o.info.push_back("C* attained at L=" + std::to_string(arg->L) + " N=" + std::to_string(arg->N) + " lambda=" + std::to_string(arg->lambda) + " " +
                     bilinear::to_string(arg->kind));
  o.info.push_back("sampled cells only: C* " + g(sampled_c) + " -> " + g(sampled_c2) + " under doubled time sampling, max per-cell change " + g(worst_cell));
  o.info.push_back(std::to_string(sampled) + " cells sampled, " + std::to_string(cells.size() - sampled - skipped) + " semi-analytic, " +
                   std::to_string(skipped) + " skipped");
  return o;
}

Outcome c6_levelset(unsigned) {
  struct Row {
    std::int64_t L, N, lam;
    bilinear::LevelSetReport r;
  };
  std::vector<Row> rows;
  for (std::int64_t L : {1, 2, 4, 8})
    for (std::int64_t N : {1, 2, 4, 8}) {
      if (N < L) continue;
      for (std::int64_t lam : {1, 2, 4, 8})
        for (auto kind : {bilinear::DataKind::flat, bilinear::DataKind::random}) {
          const lattice::TorusSpec torus(lam);
          const SeedTree s = SeedTree(6).derive(static_cast<std::uint64_t>(L)).derive(static_cast<std::uint64_t>(N)).derive(static_cast<std::uint64_t>(lam));
          const auto uL = bilinear::block_data(L, torus, kind, s.derive("L"));
          const auto uN = bilinear::block_data(N, torus, kind, s.derive("N"));
          rows.push_back({L, N, lam, bilinear::levelset_chain_check(uL, uN, L, N, 512, 512)});
        }
    }
  double worst_lc = 0.0, fitted = 0.0, holdout = 0.0, max_sup_over_bound = 0.0;
  int above_bound = 0, literal_exceeded = 0, direct_within = 0;
  for (const auto& [L, N, lam, r] : rows) {
    if (r.measure_above_bound > 0.0) ++above_bound;
    if (r.table.sampled_sup > r.literal_threshold) ++literal_exceeded;
    max_sup_over_bound = std::max(max_sup_over_bound, r.table.sampled_sup / r.sup_bound);
    worst_lc = std::max(worst_lc, r.layer_cake_vs_grid);
    if (r.layer_cake_vs_direct <= 0.05) ++direct_within;
    (lam <= 2 ? fitted : holdout) = std::max(lam <= 2 ? fitted : holdout, r.mu2_ratio);
  }
  Outcome o;
  o.pass = above_bound == 0 && worst_lc <= 0.05 && holdout <= fitted;
  o.detail = std::to_string(rows.size()) + " cells at 512x512: |E_mu| = 0 above 2 sqrt(LN) in all but " + std::to_string(above_bound) +
             "; layer-cake vs grid ||B||_4^4 max rel err " + g(worst_lc) + " (tol 0.05); mu^2|E_mu| / (1/lambda + 1/N^2) fitted " + g(fitted) +
             " on lambda <= 2, max " + g(holdout) + " on lambda in {4, 8}";
  o.info.push_back("max sampled sup / (2 sqrt(LN)) = " + g(max_sup_over_bound) + "; sup exceeds sqrt(LN) itself in " + std::to_string(literal_exceeded) +
                   " cells, so the implied constant is needed");
  o.info.push_back("layer-cake within 5% of the eta-weighted ||B||_4^4 in " + std::to_string(direct_within) + "/" + std::to_string(rows.size()) +
                   " cells; the rest are limited by 512 time nodes against cubic time frequencies");
  return o;
}

Outcome c7_arithmetic(unsigned) {
  Outcome o;
  double tmin = 1.0, tmax = 0.0;
  for (std::int64_t Q = 16; Q <= (1 << 20); Q *= 2) {
    const double s = arith::totient_sum(Q);
    tmin = std::min(tmin, s), tmax = std::max(tmax, s);
  }
  bool disjoint = true;
  for (std::int64_t Q = 4; Q <= 512; Q *= 2) disjoint = disjoint && arith::bump_arcs_disjoint(arith::farey_pairs(Q));
  double wmin = 1e300, wmax = 0.0;
  std::string ws;
  for (std::int64_t p : {64, 256, 1024}) {
    const auto w = arith::weyl_bound_ratio(p, 8, 0.05, SeedTree(7));
    wmin = std::min(wmin, w.max_ratio), wmax = std::max(wmax, w.max_ratio);
    ws += " p=" + std::to_string(p) + ":" + g(w.max_ratio);
  }
  const auto fit = arith::decay_fit({4, 8, 16, 32, 64}, 16, 0.05, 2.0);
  o.pass = tmin >= 0.3 && tmax <= 0.8 && disjoint && wmax / wmin <= 2.0 && fit.violations == 0;
  o.detail = "totient sums in [" + g(tmin) + ", " + g(tmax) + "] for Q=2^4..2^20; plateau-bump arcs disjoint for Q=4..512: " +
             (disjoint ? "yes" : "no") + "; Weyl ratio spread " + g(wmax / wmin) + " (tol 2); F Phi decay fit C = " + g(fit.C) + " with " +
             std::to_string(fit.violations) + " violations";
  o.info.push_back("Weyl ratios at Q=8:" + ws);
  o.info.push_back("decay constant fitted on Q <= 16 only: " + g(fit.holdout_C) + ", " + std::to_string(fit.holdout_violations) +
                   " exceedances on Q = 32, 64");
  o.info.push_back("radius 1/q^2 arcs disjoint at Q=8: " + std::string(arith::arcs_disjoint(arith::farey_pairs(8), 1, 1, 1) ? "yes" : "no"));
  return o;
}

Outcome c8_gradient(unsigned shards) {
  double worst = 0.0;
  int idx = 0;
  for (int p : {4, 6, 8, 10, 12})
    for (std::int64_t N : {2, 3, 4, 5}) {
      const auto a = extremizer::gaussian_window(N, SeedTree(800).derive(static_cast<std::uint64_t>(idx++)));
      worst = std::max(worst, extremizer::finite_difference_check(extremizer::make_objective(p, extremizer::kMaxGridNodes, shards), a, 1e-5).max_relative_error);
    }
  Outcome o;
  bool monotone = true;
  double best8 = 0.0, best32 = 0.0;
  extremizer::AscentConfig cfg;
  cfg.shards = shards;
  for (std::int64_t N : {8, 32}) {
    const auto r = extremizer::ascend(N, 4, cfg);
    monotone = monotone && r.monotone;
    (N == 8 ? best8 : best32) = r.objective;
  }
  o.pass = worst <= 1e-5 && monotone && best8 <= 3.0 + 1e-3 && best32 <= 3.0 + 1e-3;
  o.detail = "gradient vs central differences on 20 instances max rel err " + g(worst) + " (tol 1e-5); ascent monotone: " + (monotone ? "yes" : "no") +
             "; p=4 best ratio^4 N=8 " + g(best8) + ", N=32 " + g(best32) + " (bound 3.001)";
  return o;
}

Outcome c9_exponent(unsigned shards) {
  extremizer::AscentConfig cfg;
  cfg.restarts = 3;
  cfg.max_iters = 40;
  cfg.shards = shards;
  const auto fit = extremizer::exponent_fit(14, {8, 16, 32, 64}, cfg, 8);
  const double target = 0.5 - 4.0 / 14.0;
  Outcome o;
  o.pass = std::abs(fit.fit.slope - target) <= 0.15;
  o.detail = "p=14 exponent " + g(fit.fit.slope) + " (95% band [" + g(fit.band_lo) + ", " + g(fit.band_hi) + "]) vs " + g(target) + " +- 0.15";
  std::string rs;
  for (const auto& r : fit.rows) rs += " " + std::to_string(r.N) + ":" + g(r.best_ratio) + (r.exact_grid ? "" : "*");
  o.info.push_back("best ratios (* = capped time grid):" + rs);
  return o;
}

Outcome c10_scaling(unsigned) {
  lattice::CoeffVector u(lattice::TorusSpec(1));
  u.set(1, 0.5);
  u.set(-1, 0.5);
  u.set(3, cplx(0.2, 0.1));
  u.set(-3, cplx(0.2, -0.1));
  const double base = gkdv::sobolev_norm(u, 0.0);
  double worst_scale = 0.0;
  for (std::int64_t lam = 2; lam <= 1024; lam *= 2)
    worst_scale = std::max(worst_scale, rel(gkdv::sobolev_norm(gkdv::rescale(u, lam), 0.0) / base, std::pow(static_cast<double>(lam), -1.0 / 6.0)));
  double max_symbol = 0.0;
  for (double N : {1.0, 3.5, 100.0})
    for (double s : {0.55, 0.75, 0.95}) {
      const gkdv::IMultiplier m(N, s);
      for (double xi = -1000.0; xi <= 1000.0; xi += 0.125) max_symbol = std::max(max_symbol, m(xi));
    }
  std::mt19937_64 rng(10);
  std::normal_distribution<double> n;
  double worst_quintic = 0.0;
  for (int i = 0; i < 30; ++i) {
    lattice::CoeffVector v{lattice::TorusSpec(1 + i % 5)};
    v.set(0, n(rng));
    for (std::int64_t k = 1; k <= 1 + i % 9; ++k) {
      const cplx a(n(rng), n(rng));
      v.set(k, a);
      v.set(-k, std::conj(a));
    }
    const double q = gkdv::quintic_integral(v);
    worst_quintic = std::max(worst_quintic, std::abs(q - gkdv::quintic_grid(v)) / std::max(1.0, std::abs(q)));
  }
  Outcome o;
  o.pass = worst_scale <= 1e-13 && max_symbol <= 1.0 && worst_quintic <= 1e-9;
  o.detail = "L^2 scaling lambda=2..2^10 max rel err " + g(worst_scale) + "; max symbol " + g(max_symbol) + "; quintic vs grid max err " + g(worst_quintic);
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Outcome c11_determinism(unsigned) {
  const fs::path dir = fs::temp_directory_path() / ("strichartz_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "u.json");
    f << R"({"lambda": 1, "coefficients": [{"k": -3, "re": 0.5, "im": 0.25}, {"k": 1, "re": 1, "im": 0}, {"k": 2, "re": -0.75, "im": 1}]})";
  }
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"counterexample", "counterexample --N 4..32"},
      {"mcount", "mcount --N 8,16"},
      {"norm", "norm --in " + (dir / "u.json").string() + " --p 8 --mode exact"},
      {"weyl", "weyl --p 64,256 --Q 8"},
      {"majorarc", "majorarc --Q 4..16"},
      {"scan", "scan --L 1,2 --N 4,8 --lambda 1,2 --data flat"},
      {"extremize", "extremize --N 2,3 --p 6 --restarts 2"},
      {"scaling", "scaling"},
      {"identities", "identities --samples 200"},
  };
  Outcome o;
  o.pass = true;
  int compared = 0;
  for (const auto& [name, args] : runs) {
    std::map<std::string, std::string> ref;
    for (const auto& tag : {std::string("a1"), std::string("a2"), std::string("s4"), std::string("s8")}) {
      const unsigned sh = tag == "s4" ? 4 : tag == "s8" ? 8 : 1;
      const fs::path out = dir / (name + "_" + tag + ".csv");
      const std::string cmd = std::string("\"") + STRICHARTZ_CLI + "\" --seed 3 --shards " + std::to_string(sh) + " --out \"" + out.string() + "\" " + args +
                              " > /dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0) {
        o.pass = false;
        o.info.push_back(name + " " + tag + ": command failed");
        continue;
      }
      std::map<std::string, std::string> files;
      const std::string stem = out.filename().string();
      for (const auto& e : fs::directory_iterator(dir)) {
        const auto fn = e.path().filename().string();
        if (fn.rfind(stem, 0) != 0 || fn.find(".manifest.json") != std::string::npos) continue;
        files[fn.substr(stem.size())] = slurp(e.path());
      }
      if (tag == "a1") {
        ref = files;
      } else if (files != ref) {
        o.pass = false;
        o.info.push_back(name + ": output differs for " + tag);
      } else {
        compared += static_cast<int>(files.size());
      }
    }
  }
  fs::remove_all(dir);
  o.detail = std::to_string(runs.size()) + " subcommands, " + std::to_string(compared) + " artifact comparisons (rerun, shards 4, shards 8) byte-identical: " +
             (o.pass ? "yes" : "no");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria 1-11"};
  std::vector<int> expect_fail, only;
  unsigned shards = 1;
  app.add_option("--expect-fail", expect_fail, "criteria known to be unattainable");
  app.add_option("--only", only, "run only these criteria");
  app.add_option("--shards", shards, "worker threads")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "exact-oracle equivalence", 10, c1_exact_oracle},
      {2, "closed-form fixtures", 5, c2_closed_forms},
      {3, "L^8 ratio growth", 900, c3_l8_growth},
      {4, "M-set lower bound", 120, c4_m_set},
      {5, "bilinear sweep constant", 1200, c5_bilinear_sweep},
      {6, "level-set chain", 300, c6_levelset},
      {7, "arithmetic toolkit", 180, c7_arithmetic},
      {8, "extremizer gradient and ascent", 300, c8_gradient},
      {9, "p=14 exponent", 900, c9_exponent},
      {10, "scaling laws", 60, c10_scaling},
      {11, "determinism", 120, c11_determinism},
  };
  const std::set<int> xfail(expect_fail.begin(), expect_fail.end()), sel(only.begin(), only.end());
  int unexpected = 0;
  for (const auto& c : criteria) {
    if (!sel.empty() && !sel.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(shards);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.limit_seconds;
    const bool pass = o.pass && in_time;
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.title << "): " << o.detail << " [" << fmt("%.1f", secs) << " s, limit "
              << c.limit_seconds << " s]" << (xfail.count(c.id) ? " (expected failure)" : "") << '\n';
    for (const auto& line : o.info) std::cout << "    info: " << line << '\n';
    if (!in_time) std::cout << "    info: runtime limit exceeded\n";
    std::cout.flush();
    if (pass == static_cast<bool>(xfail.count(c.id))) ++unexpected;
  }
  if (unexpected) std::cout << unexpected << " unexpected result(s)\n";
  return unexpected ? 1 : 0;
}

#pragma once

// Batch runner behind the strichartz CLI: config assembly and validation,
// one CSV artifact per subcommand with a JSON manifest sidecar.

#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "strichartz/arithmetic.hpp"
#include "strichartz/bilinear.hpp"
#include "strichartz/common.hpp"
#include "strichartz/counterexample.hpp"
#include "strichartz/extremizer.hpp"
#include "strichartz/gkdv.hpp"
#include "strichartz/io.hpp"
#include "strichartz/lattice.hpp"
#include "strichartz/norms.hpp"
#include "strichartz/schema.hpp"

namespace strichartz::runner {

using nlohmann::json;

enum ExitCode : int { kOk = 0, kRuntime = 1, kConfig = 2, kGuard = 3 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// "1..256" is the dyadic range, "1,3,8" an explicit list.
inline std::vector<std::int64_t> parse_int_list(const std::string& text) {
  std::vector<std::int64_t> out;
  try {
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
      const std::int64_t lo = std::stoll(text.substr(0, dots)), hi = std::stoll(text.substr(dots + 2));
      if (!is_dyadic(lo) || !is_dyadic(hi) || hi < lo) throw ConfigError("range '" + text + "' needs dyadic endpoints lo <= hi");
      return dyadic_range(lo, hi);
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoll(item));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse integer list '" + text + "'");
  }
  if (out.empty()) throw ConfigError("empty integer list");
  return out;
}

inline std::vector<std::string> parse_word_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

struct Artifact {
  std::string suffix;  ///< appended to the output path; empty for the main CSV
  std::string content;
};

struct RunResult {
  std::vector<Artifact> artifacts;
  int guard_trips = 0;
  std::string summary;  ///< one human-readable line for stdout
};

namespace detail {

inline std::vector<std::int64_t> ints(const json& j, const char* key, std::vector<std::int64_t> dflt) {
  return j.contains(key) ? j.at(key).get<std::vector<std::int64_t>>() : dflt;
}

inline json section(const json& cfg, const std::string& name) { return cfg.value(name, json::object()); }

inline std::string seconds_cell(bool timing, double s) { return timing ? io::format_double(s) : std::string(); }

inline double now() { return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count(); }

inline lattice::CoeffVector load_coeffs(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read coefficient file '" + path + "'");
  try {
    return lattice::coeffs_from_json(json::parse(f));
  } catch (const json::exception& e) {
    throw ConfigError("coefficient file '" + path + "': " + e.what());
  }
}

inline RunResult run_norm(const json& cfg) {
  const auto sec = section(cfg, "norm");
  const auto u = load_coeffs(sec.at("input").get<std::string>());
  const int p = sec.value("p", 8);
  const std::string mode = sec.value("mode", "auto");
  io::CsvTable t({"p", "method", "value", "power", "std_error", "M", "lambda", "seconds", "skipped"});
  const auto M = static_cast<std::int64_t>(u.size());
  const double t0 = now();
  RunResult r;
  auto sampled = [&] {
    norms::SampleOptions o;
    o.t_samples = sec.value("t_samples", 256);
    o.shifts = sec.value("shifts", 8);
    return norms::lp_sampled(u, p, o, SeedTree(cfg.value("seed", std::uint64_t{0})).derive("norm"));
  };
  try {
    norms::NormResult n;
    if (mode == "sampled") {
      n = sampled();
    } else {
      try {
        n = norms::lp_exact_torus(u, p, cfg.value("shards", 1u));
      } catch (const guard_error&) {
        if (mode == "exact") throw;
        n = sampled();
      }
    }
    t.add_row({std::int64_t{p}, norms::to_string(n.method), n.value, n.power(), n.std_error, M, u.lambda(),
               seconds_cell(cfg.value("timing", false), now() - t0), std::string()});
    r.summary = "||u||_" + std::to_string(p) + " = " + io::format_double(n.value) + " (" + norms::to_string(n.method) + ")";
  } catch (const guard_error& e) {
    ++r.guard_trips;
    t.add_row({std::int64_t{p}, std::string("skipped"), 0.0, 0.0, 0.0, M, u.lambda(), std::string(), std::string(e.what())});
    r.summary = std::string("skipped: ") + e.what();
  }
  r.artifacts.push_back({"", t.str()});
  return r;
}

inline RunResult run_counterexample(const json& cfg) {
  const auto sec = section(cfg, "counterexample");
  const auto Ns = ints(sec, "N", dyadic_range(4, 64));
  const bool timing = cfg.value("timing", false);
  const unsigned shards = cfg.value("shards", 1u);
  RunResult r;
  std::vector<counterexample::RatioRow> rows;
  std::vector<double> secs;
  std::vector<std::string> skipped;
  for (auto N : Ns) {
    const double t0 = now();
    try {
      rows.push_back(counterexample::l8_ratio(N, shards));
      skipped.emplace_back();
    } catch (const guard_error& e) {
      ++r.guard_trips;
      rows.push_back({N, 0.0, 0.0});
      skipped.emplace_back(e.what());
    }
    secs.push_back(now() - t0);
  }
  std::vector<double> x, y;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (skipped[i].empty()) x.push_back(std::log(static_cast<double>(rows[i].N))), y.push_back(rows[i].ratio);
  const bool has_fit = x.size() >= 2;
  const LinearFit fit = has_fit ? linear_fit(x, y) : LinearFit{};
  io::CsvTable t({"N", "l8_eighth_power", "ratio", "fit_slope", "fit_r2", "seconds", "skipped"});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const io::Cell slope = has_fit ? io::Cell{fit.slope} : io::Cell{std::string()};
    const io::Cell r2 = has_fit ? io::Cell{fit.r2} : io::Cell{std::string()};
    t.add_row({rows[i].N, rows[i].l8_eighth_power, rows[i].ratio, slope, r2, seconds_cell(timing, secs[i]), skipped[i]});
  }
  r.artifacts.push_back({"", t.str()});
  if (has_fit) r.summary = "r(N) = " + io::format_double(fit.slope) + " log N + " + io::format_double(fit.intercept) + ", R^2 = " + io::format_double(fit.r2);
  return r;
}

inline RunResult run_mcount(const json& cfg) {
  const auto sec = section(cfg, "mcount");
  const auto Ns = ints(sec, "N", {8, 16});
  const unsigned shards = cfg.value("shards", 1u);
  RunResult r;
  io::CsvTable t({"N", "xi4", "alpha", "count", "witness", "shape", "ratio"});
  json fixture = json::array();
  for (auto N : Ns) {
    try {
      for (std::int64_t xi4 = -N / 8; xi4 <= N / 8; ++xi4) {
        const auto h = counterexample::m_set_histogram(xi4, N, shards);
        const auto wh = counterexample::m_set_witness_histogram(xi4, N);
        const auto amax = static_cast<std::int64_t>(std::floor(static_cast<double>(N) / japanese(static_cast<double>(xi4)))) + 1;
        for (std::int64_t a = 1; a <= amax; ++a) {
          const auto it = h.find(a);
          const auto wit = wh.find(a);
          const std::int64_t c = it == h.end() ? 0 : it->second;
          const double shape = counterexample::m_set_shape({a, xi4, N});
          t.add_row({N, xi4, a, c, wit == wh.end() ? std::int64_t{0} : wit->second, shape, static_cast<double>(c) / shape});
          fixture.push_back({{"N", N}, {"xi4", xi4}, {"alpha", a}, {"count", c}});
        }
      }
    } catch (const guard_error& e) {
      ++r.guard_trips;
      r.summary += std::string("skipped N=") + std::to_string(N) + ": " + e.what() + "; ";
    }
  }
  r.artifacts.push_back({"", t.str()});
  if (sec.contains("fixture")) r.artifacts.push_back({"@" + sec.at("fixture").get<std::string>(), fixture.dump(1) + "\n"});
  return r;
}

inline RunResult run_weyl(const json& cfg) {
  const auto sec = section(cfg, "weyl");
  const auto ps = ints(sec, "p", {64, 256, 1024});
  const std::int64_t Q = sec.value("Q", std::int64_t{8});
  const int draws = sec.value("draws", 3);
  const double eps = cfg.value("eps", 0.05);
  const SeedTree seed(cfg.value("seed", std::uint64_t{0}));
  io::CsvTable t({"p", "Q", "eps", "max_ratio", "argmax_a", "argmax_q", "argmax_t"});
  double lo = 1e300, hi = 0.0;
  for (auto p : ps) {
    const auto w = arith::weyl_bound_ratio(p, Q, eps, seed, draws);
    lo = std::min(lo, w.max_ratio), hi = std::max(hi, w.max_ratio);
    t.add_row({p, Q, eps, w.max_ratio, w.argmax_a, w.argmax_q, w.argmax_t});
  }
  RunResult r;
  r.artifacts.push_back({"", t.str()});
  r.summary = "Weyl ratio spread max/min = " + io::format_double(hi / lo);
  return r;
}

inline RunResult run_majorarc(const json& cfg) {
  const auto sec = section(cfg, "majorarc");
  const auto Qs = ints(sec, "Q", {4, 8, 16});
  const std::int64_t factor = sec.value("gamma_factor", std::int64_t{16});
  const double eps = cfg.value("eps", 0.05);
  RunResult r;
  const auto fit = arith::decay_fit(Qs, factor, eps, 2.0);
  io::CsvTable t({"Q", "pairs", "totient_sum", "bump_arcs_disjoint", "unit_arcs_disjoint", "phi_hat0", "phi_l2", "parseval_partial",
                  "decay_max_ratio", "decay_C", "decay_violations"});
  for (std::size_t i = 0; i < Qs.size(); ++i) {
    const auto Q = Qs[i];
    const auto sys = arith::farey_pairs(Q);
    t.add_row({Q, static_cast<std::int64_t>(sys.pairs.size()), arith::totient_sum(Q), std::int64_t{arith::bump_arcs_disjoint(sys)},
               std::int64_t{arith::arcs_disjoint(sys, 1, 1, 1)}, arith::phi_fourier(0, sys).real(), arith::phi_l2_squared(sys),
               arith::parseval_partial(sys, factor * Q * Q), fit.per_Q[i].second, fit.C, fit.violations});
  }
  r.artifacts.push_back({"", t.str()});
  const auto cells = sec.value("kernel_cells", json::array({{1, 4}, {2, 8}, {4, 16}}));
  if (!cells.empty()) {
    io::CsvTable k({"L", "N", "lambda", "Q", "sup_K", "sup_K1", "phi_hat0", "ratio", "skipped"});
    for (const auto& c : cells) {
      const auto L = c.at(0).get<std::int64_t>(), N = c.at(1).get<std::int64_t>();
      for (auto lam : ints(sec, "kernel_lambda", {1, 2, 4})) {
        try {
          const auto ks = arith::kernel_K1_sup(L, N, lattice::TorusSpec(lam), eps);
          k.add_row({L, N, lam, ks.Q, ks.sup_K, ks.sup_K1, ks.phi_hat0, ks.ratio, std::string()});
        } catch (const guard_error& e) {
          ++r.guard_trips;
          k.add_row({L, N, lam, std::int64_t{0}, 0.0, 0.0, 0.0, 0.0, std::string(e.what())});
        }
      }
    }
    r.artifacts.push_back({".kernel.csv", k.str()});
  }
  r.summary = "decay fit C = " + io::format_double(fit.C) + " with " + std::to_string(fit.violations) + " violations";
  return r;
}

inline std::vector<bilinear::DataKind> kinds_of(const json& sec) {
  std::vector<bilinear::DataKind> out;
  for (const auto& s : sec.value("data", std::vector<std::string>{"flat"})) out.push_back(bilinear::data_kind_from_string(s));
  return out;
}

inline RunResult run_scan(const json& cfg) {
  const auto sec = section(cfg, "scan");
  bilinear::ScanConfig sc;
  sc.Ls = ints(sec, "L", {1, 2, 4});
  sc.Ns = ints(sec, "N", dyadic_range(4, 64));
  sc.lambdas = ints(sec, "lambda", {1, 4, 16});
  sc.kinds = kinds_of(sec);
  sc.random_draws = sec.value("draws", 5);
  sc.eps = cfg.value("eps", 0.05);
  sc.seed = cfg.value("seed", std::uint64_t{0});
  sc.shards = cfg.value("shards", 1u);
  sc.bilinear.sampling.t_samples = sec.value("t_samples", std::size_t{256});
  sc.bilinear.sampling.shifts = sec.value("shifts", std::size_t{8});
  const auto cells = bilinear::scan(sc);
  RunResult r;
  io::CsvTable t({"L", "N", "lambda", "kind", "lhs4", "rhs", "ratio", "stderr", "draw", "method", "skipped"});
  for (const auto& c : cells) {
    if (!c.skipped.empty()) ++r.guard_trips;
    t.add_row({c.L, c.N, c.lambda, bilinear::to_string(c.kind), c.lhs4(), c.rhs, c.ratio, c.lhs.std_error, std::int64_t{c.seed_index},
               norms::to_string(c.lhs.method), c.skipped});
  }
  r.artifacts.push_back({"", t.str()});
  r.summary = "C* = " + io::format_double(bilinear::empirical_constant(cells)) + " over " + std::to_string(cells.size()) + " cells";
  return r;
}

inline RunResult run_levelset(const json& cfg) {
  const auto sec = section(cfg, "levelset");
  const auto Ls = ints(sec, "L", {1});
  const auto Ns = ints(sec, "N", {2, 4});
  const auto lams = ints(sec, "lambda", {1, 2, 4});
  const auto kinds = kinds_of(sec);
  const auto T = sec.value("T", std::size_t{512}), X = sec.value("X", std::size_t{512});
  const double eps = cfg.value("eps", 0.05);
  const SeedTree seed = SeedTree(cfg.value("seed", std::uint64_t{0})).derive("levelset");
  io::CsvTable t({"L", "N", "lambda", "kind", "sampled_sup", "sup_bound", "literal_threshold", "measure_above_bound", "grid_l4_power",
                  "layer_cake_l4_power", "direct_l4_power", "layer_cake_vs_grid", "layer_cake_vs_direct", "max_mu2_measure", "smallness",
                  "mu2_ratio", "cutoff", "low_part", "high_part"});
  RunResult r;
  for (auto L : Ls)
    for (auto N : Ns) {
      if (N < L) continue;
      for (auto lam : lams)
        for (auto kind : kinds) {
          const lattice::TorusSpec torus(lam);
          const auto cs = seed.derive(static_cast<std::uint64_t>(L)).derive(static_cast<std::uint64_t>(N)).derive(static_cast<std::uint64_t>(lam));
          const auto uL = bilinear::block_data(L, torus, kind, cs.derive("L"));
          const auto uN = bilinear::block_data(N, torus, kind, cs.derive("N"));
          try {
            const auto rep = bilinear::levelset_chain_check(uL, uN, L, N, T, X, eps);
            t.add_row({L, N, lam, bilinear::to_string(kind), rep.table.sampled_sup, rep.sup_bound, rep.literal_threshold, rep.measure_above_bound,
                       rep.table.sampled_l4_power, rep.layer_cake_l4_power, rep.direct_l4_power, rep.layer_cake_vs_grid, rep.layer_cake_vs_direct,
                       rep.max_mu2_measure, rep.smallness, rep.mu2_ratio, rep.cutoff, rep.low_part, rep.high_part});
          } catch (const guard_error& e) {
            ++r.guard_trips;
            r.summary += std::string("skipped: ") + e.what() + "; ";
          }
        }
    }
  r.artifacts.push_back({"", t.str()});
  return r;
}

inline RunResult run_extremize(const json& cfg) {
  const auto sec = section(cfg, "extremize");
  const auto Ns = ints(sec, "N", {8});
  const int p = sec.value("p", 8);
  extremizer::AscentConfig ac;
  ac.restarts = sec.value("restarts", 4);
  ac.max_iters = sec.value("max_iters", 200);
  ac.tolerance = sec.value("tolerance", 1e-8);
  ac.seed = cfg.value("seed", std::uint64_t{0});
  ac.shards = cfg.value("shards", 1u);
  const auto f = extremizer::make_objective(p, extremizer::kMaxGridNodes);
  io::CsvTable t({"N", "p", "best_ratio", "objective", "iters", "restarts", "seed", "best_restart", "monotone"});
  json dump = json::array();
  RunResult r;
  for (auto N : Ns) {
    try {
      const auto res = extremizer::ascend(N, p, ac, f);
      t.add_row({N, std::int64_t{p}, res.ratio, res.objective, std::int64_t{res.iters}, std::int64_t{ac.restarts}, static_cast<std::int64_t>(ac.seed),
                 std::int64_t{res.best_restart}, std::int64_t{res.monotone}});
      dump.push_back({{"N", N}, {"p", p}, {"ratio", res.ratio}, {"coefficients", lattice::to_json(extremizer::to_coeff_vector(res.best))}});
    } catch (const guard_error& e) {
      ++r.guard_trips;
      r.summary += std::string("skipped N=") + std::to_string(N) + ": " + e.what() + "; ";
    }
  }
  r.artifacts.push_back({"", t.str()});
  if (sec.contains("dump")) r.artifacts.push_back({"@" + sec.at("dump").get<std::string>(), dump.dump(1) + "\n"});
  return r;
}

/// cos(2 pi x) + cos(4 pi x) / 2 on T.
inline lattice::CoeffVector default_scaling_data() {
  lattice::CoeffVector u(lattice::TorusSpec(1));
  u.set(1, 0.5);
  u.set(-1, 0.5);
  u.set(2, 0.25);
  u.set(-2, 0.25);
  return u;
}

inline RunResult run_scaling(const json& cfg) {
  const auto sec = section(cfg, "scaling");
  std::vector<std::int64_t> dflt;
  for (int i = 0; i <= 8; ++i) dflt.push_back(std::int64_t{1} << i);
  const auto lams = ints(sec, "lambda", dflt);
  const double s = sec.value("s", 0.75);
  const auto u0 = sec.contains("input") ? load_coeffs(sec.at("input").get<std::string>()) : default_scaling_data();
  const double m0 = std::sqrt(u0.mass());
  const auto rows = gkdv::smallness_check(u0, s, lams);
  io::CsvTable t({"lambda", "l2_ratio", "expected", "rel_error", "N", "derivative_squared", "hamiltonian", "h_ratio"});
  for (std::size_t i = 0; i < lams.size(); ++i) {
    const double ratio = std::sqrt(gkdv::rescale(u0, lams[i]).mass()) / m0;
    const double expected = std::pow(static_cast<double>(lams[i]), -1.0 / 6.0);
    t.add_row({lams[i], ratio, expected, std::abs(ratio - expected) / expected, rows[i].N, rows[i].derivative_squared, rows[i].hamiltonian,
               rows[i].ratio});
  }
  RunResult r;
  r.artifacts.push_back({"", t.str()});
  return r;
}

inline RunResult run_identities(const json& cfg) {
  const auto sec = section(cfg, "identities");
  const int samples = sec.value("samples", 20);
  const double N1 = sec.value("N1", 64.0), N = sec.value("N", 4.0);
  auto rng = SeedTree(cfg.value("seed", std::uint64_t{0})).derive("identities").engine();
  std::uniform_real_distribution<double> big(N1, 2.0 * N1), small(-N, N), unit(-1.0, 1.0);
  io::CsvTable t({"sample", "xi1", "xi2", "xi3", "xi4", "xi5", "residual", "scale", "relative"});
  for (int i = 0; i < samples; ++i) {
    std::array<double, 5> xi{big(rng), small(rng), small(rng), -big(rng), 0.0};
    xi[4] = -(xi[0] + xi[1] + xi[2] + xi[3]);
    std::array<double, 5> tau{};
    for (int j = 0; j < 4; ++j) tau[j] = unit(rng) * N1 * N1 * N1;
    tau[4] = -(tau[0] + tau[1] + tau[2] + tau[3]);
    const auto res = gkdv::five_tuple_identity_check(tau, xi, N1, N);
    t.add_row({std::int64_t{i}, xi[0], xi[1], xi[2], xi[3], xi[4], res.residual, res.scale, res.residual / res.scale});
  }
  RunResult r;
  r.artifacts.push_back({"", t.str()});
  return r;
}

}  // namespace detail

/// Fills nothing in: defaults live in the runners. Throws ConfigError on a
/// schema violation.
inline void validate_config(const json& cfg) {
  if (auto e = schema::validate(cfg)) throw ConfigError("config " + *e);
}

inline RunResult execute(const json& cfg) {
  validate_config(cfg);
  const auto sub = cfg.at("subcommand").get<std::string>();
  try {
    if (sub == "norm") return detail::run_norm(cfg);
    if (sub == "counterexample") return detail::run_counterexample(cfg);
    if (sub == "mcount") return detail::run_mcount(cfg);
    if (sub == "weyl") return detail::run_weyl(cfg);
    if (sub == "majorarc") return detail::run_majorarc(cfg);
    if (sub == "scan") return detail::run_scan(cfg);
    if (sub == "levelset") return detail::run_levelset(cfg);
    if (sub == "extremize") return detail::run_extremize(cfg);
    if (sub == "scaling") return detail::run_scaling(cfg);
    if (sub == "identities") return detail::run_identities(cfg);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown subcommand '" + sub + "'");
}

inline json guard_limits() {
  return {{"exact_support_p8", norms::ExactGuards{}.max_support_p8},
          {"exact_support_p6", norms::ExactGuards{}.max_support_p6},
          {"exact_support_p4", norms::ExactGuards{}.max_support_p4},
          {"max_frequency", lattice::kMaxFrequency},
          {"counterexample_max_N", counterexample::kMaxSweepN},
          {"mcount_max_N", counterexample::kMaxMSetN},
          {"max_Q", arith::kMaxQ},
          {"farey_pairs", arith::kMaxFareyPairs},
          {"kernel_lambda_N", arith::kMaxKernelLambdaN},
          {"bilinear_semi_cost", norms::BilinearOptions{}.max_semi_cost},
          {"gradient_support", extremizer::kMaxGradientSupport},
          {"grid_nodes", extremizer::kMaxGridNodes},
          {"hamiltonian_support", gkdv::kMaxHamiltonianSupport}};
}

inline json profile_ids() {
  return {{"eta", norms::default_eta().id()}, {"phi", profiles::phi_bump().id()}};
}

/// Writes every artifact of `result` next to `out` (suffix "@path" means an
/// explicit path) with a manifest sidecar each.
inline void write_result(const RunResult& result, const std::filesystem::path& out, io::RunManifest manifest) {
  for (const auto& a : result.artifacts) {
    std::filesystem::path p;
    if (!a.suffix.empty() && a.suffix.front() == '@') {
      p = a.suffix.substr(1);
    } else {
      p = out;
      p += a.suffix;
    }
    io::write_artifact(p, a.content, manifest);
  }
}

/// CLI entry point. Exit codes: 0 success, 1 runtime error, 2 invalid
/// configuration, 3 guard trips under --strict.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Numerical experiments for periodic Airy Strichartz estimates"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out_path;
  std::uint64_t seed = 0;
  unsigned shards = 1;
  double eps = 0.05;
  bool strict = false, timing = false;
  app.add_option("--config", config_path, "JSON configuration file");
  auto* o_seed = app.add_option("--seed", seed, "root seed");
  auto* o_shards = app.add_option("--shards", shards, "worker threads");
  auto* o_eps = app.add_option("--eps", eps, "epsilon in the '+' exponents");
  auto* o_out = app.add_option("--out", out_path, "output CSV path");
  app.add_flag("--strict", strict, "exit 3 when a cost guard trips");
  app.add_flag("--timing", timing, "fill the seconds column");

  std::map<std::string, std::map<std::string, std::string>> given;
  auto opt = [&](CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
    sub->add_option_function<std::string>(flag, [&given, name = sub->get_name(), key](const std::string& v) { given[name][key] = v; }, help);
  };
  auto* s_norm = app.add_subcommand("norm", "L^p norm of coefficients on T");
  opt(s_norm, "--in", "input", "coefficient JSON");
  opt(s_norm, "--p", "p", "exponent");
  opt(s_norm, "--mode", "mode", "auto, exact or sampled");
  auto* s_ce = app.add_subcommand("counterexample", "L^8 ratio of flat annulus data");
  opt(s_ce, "--N", "N", "dyadic list or range");
  auto* s_mc = app.add_subcommand("mcount", "resonance set counts");
  opt(s_mc, "--N", "N", "dyadic list or range");
  opt(s_mc, "--fixture", "fixture", "JSON fixture path");
  auto* s_w = app.add_subcommand("weyl", "Weyl sum ratios on major arcs");
  opt(s_w, "--p", "p", "lengths");
  opt(s_w, "--Q", "Q", "arc level");
  auto* s_ma = app.add_subcommand("majorarc", "Farey arcs, Phi and the kernel K_1");
  opt(s_ma, "--Q", "Q", "dyadic list or range");
  opt(s_ma, "--gamma-factor", "gamma_factor", "tabulate gamma up to factor Q^2");
  auto* s_scan = app.add_subcommand("scan", "bilinear L^4 over dyadic cells");
  opt(s_scan, "--L", "L", "dyadic list or range");
  opt(s_scan, "--N", "N", "dyadic list or range");
  opt(s_scan, "--lambda", "lambda", "torus periods");
  opt(s_scan, "--data", "data", "flat,random");
  opt(s_scan, "--draws", "draws", "random draws per cell");
  opt(s_scan, "--t-samples", "t_samples", "time nodes per shift");
  auto* s_ls = app.add_subcommand("levelset", "superlevel sets of the bilinear field");
  opt(s_ls, "--L", "L", "dyadic list or range");
  opt(s_ls, "--N", "N", "dyadic list or range");
  opt(s_ls, "--lambda", "lambda", "torus periods");
  opt(s_ls, "--data", "data", "flat,random");
  auto* s_ex = app.add_subcommand("extremize", "projected gradient ascent of the Strichartz ratio");
  opt(s_ex, "--N", "N", "window sizes");
  opt(s_ex, "--p", "p", "exponent");
  opt(s_ex, "--restarts", "restarts", "restarts");
  opt(s_ex, "--dump", "dump", "JSON path for the best coefficients");
  auto* s_sc = app.add_subcommand("scaling", "rescaling, I-multiplier and Hamiltonian sweep");
  opt(s_sc, "--lambda", "lambda", "torus periods");
  opt(s_sc, "--s", "s", "Sobolev index");
  opt(s_sc, "--in", "input", "real coefficient JSON on T");
  auto* s_id = app.add_subcommand("identities", "five-frequency resonance residuals");
  opt(s_id, "--samples", "samples", "number of tuples");

  std::vector<std::string> cmdline;
  for (int i = 0; i < argc; ++i) cmdline.emplace_back(argv[i]);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfig;
  }

  json cfg = json::object();
  try {
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw ConfigError("cannot read config '" + config_path + "'");
      try {
        cfg = json::parse(f);
      } catch (const json::exception& e) {
        throw ConfigError("config '" + config_path + "' is not valid JSON: " + e.what());
      }
      if (!cfg.is_object()) throw ConfigError("config root must be an object");
    }
    const std::string sub = app.get_subcommands().front()->get_name();
    cfg["subcommand"] = sub;
    if (*o_seed) cfg["seed"] = seed;
    if (*o_shards) cfg["shards"] = shards;
    if (*o_eps) cfg["eps"] = eps;
    if (*o_out) cfg["out"] = out_path;
    if (strict) cfg["strict"] = true;
    if (timing) cfg["timing"] = true;
    static const std::set<std::string> list_keys{"N", "L", "lambda", "Q"};
    static const std::set<std::string> int_keys{"p", "draws", "t_samples", "restarts", "samples", "gamma_factor"};
    for (const auto& [key, value] : given[sub]) {
      auto& dst = cfg[sub];
      if (key == "data") {
        dst[key] = parse_word_list(value);
      } else if ((list_keys.count(key) && !(key == "Q" && sub == "weyl")) || (key == "p" && sub == "weyl")) {
        dst[key] = parse_int_list(value);
      } else if (int_keys.count(key) || key == "Q") {
        const auto v = parse_int_list(value);
        if (v.size() != 1) throw ConfigError("--" + key + " takes a single integer");
        dst[key] = v.front();
      } else if (key == "s") {
        try {
          dst[key] = std::stod(value);
        } catch (const std::exception&) {
          throw ConfigError("cannot parse --s '" + value + "'");
        }
      } else {
        dst[key] = value;
      }
    }
    if (!cfg.contains("out")) cfg["out"] = sub + ".csv";

    const double t0 = detail::now();
    const auto result = execute(cfg);
    io::RunManifest m;
    for (std::size_t i = 0; i < cmdline.size(); ++i) m.command_line += (i ? " " : "") + cmdline[i];
    m.subcommand = sub;
    m.config = cfg;
    m.seed = cfg.value("seed", std::uint64_t{0});
    m.shards = cfg.value("shards", 1u);
    m.wall_seconds = detail::now() - t0;
    m.guards = guard_limits();
    m.profiles = profile_ids();
    write_result(result, cfg.at("out").get<std::string>(), m);
    if (!result.summary.empty()) out << result.summary << '\n';
    out << "wrote " << cfg.at("out").get<std::string>() << '\n';
    if (result.guard_trips > 0) {
      err << result.guard_trips << " cost guard trip(s) recorded as skipped rows\n";
      if (cfg.value("strict", false)) return kGuard;
    }
    return kOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
}

}  // namespace strichartz::runner

#pragma once

// Exact frequency-tuple counting on Z: spectra of products u^m keyed by
// (linear sum S, cubic sum C). Since k^3 == k (mod 6), every key satisfies
// C == S (mod 6), and we store the reduced coordinate E = (C - S) / 6 so that
// combining two keys adds both coordinates.
//
// Spectra are held as groups indexed by S, each sorted by E with equal keys
// merged. A convolution is evaluated one target S at a time; per-S results are
// combined in increasing S, so output does not depend on the shard count.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "strichartz/common.hpp"
#include "strichartz/lattice.hpp"

namespace strichartz::counting {

inline double sq_abs(double v) { return v * v; }
inline double sq_abs(const cplx& v) { return std::norm(v); }
inline double conj_if(double v) { return v; }
inline cplx conj_if(const cplx& v) { return std::conj(v); }

template <class T>
struct Group {
  std::vector<std::int64_t> e;
  std::vector<T> v;

  std::size_t size() const { return e.size(); }
  bool empty() const { return e.empty(); }
};

template <class T>
class GroupedSpectrum {
 public:
  GroupedSpectrum() = default;
  GroupedSpectrum(std::int64_t s_min, std::int64_t s_max) : s_min_(s_min), groups_(static_cast<std::size_t>(s_max - s_min + 1)) {}

  bool empty() const { return groups_.empty(); }
  std::int64_t s_min() const { return s_min_; }
  std::int64_t s_max() const { return s_min_ + static_cast<std::int64_t>(groups_.size()) - 1; }

  const Group<T>* find(std::int64_t s) const {
    if (groups_.empty() || s < s_min_ || s > s_max()) return nullptr;
    const auto& g = groups_[static_cast<std::size_t>(s - s_min_)];
    return g.empty() ? nullptr : &g;
  }
  Group<T>& at(std::int64_t s) { return groups_[static_cast<std::size_t>(s - s_min_)]; }
  const Group<T>& at(std::int64_t s) const { return groups_[static_cast<std::size_t>(s - s_min_)]; }

  std::size_t entries() const {
    std::size_t n = 0;
    for (const auto& g : groups_) n += g.size();
    return n;
  }

  double sum_sq() const {
    CompensatedSum<double> acc;
    for (const auto& g : groups_) {
      CompensatedSum<double> local;
      for (const auto& x : g.v) local.add(sq_abs(x));
      acc.add(local.value());
    }
    return acc.value();
  }

  /// Cubic sum of entry i in group s.
  static std::int64_t cubic(std::int64_t s, std::int64_t e) { return s + 6 * e; }

 private:
  std::int64_t s_min_ = 0;
  std::vector<Group<T>> groups_;
};

/// Spectrum of u itself: key (k, k^3).
template <class T>
GroupedSpectrum<T> singles(const lattice::CoeffVector& u) {
  if (u.empty()) return {};
  if constexpr (std::is_same_v<T, double>) {
    if (!u.all_real()) throw std::invalid_argument("real counting path needs real amplitudes");
  }
  const std::int64_t lo = u.entries().begin()->first, hi = u.entries().rbegin()->first;
  GroupedSpectrum<T> g(lo, hi);
  for (const auto& [k, a] : u) {
    lattice::check_frequency(k);
    auto& grp = g.at(k);
    grp.e.push_back((lattice::cube(k) - k) / 6);
    if constexpr (std::is_same_v<T, double>)
      grp.v.push_back(a.real());
    else
      grp.v.push_back(a);
  }
  return g;
}

struct KernelLimits {
  /// Largest number of generated entries held at once for a single target S.
  std::size_t max_entries = std::size_t{1} << 22;
  static constexpr int kBucketBits = 16;
};

namespace detail {

template <class T>
struct Workspace {
  std::vector<std::size_t> bucket_count;
  std::vector<std::size_t> bucket_start;
  std::vector<std::uint16_t> low;
  std::vector<T> val;
  std::vector<T> dense;
  std::vector<std::uint32_t> stamp;
  std::vector<std::uint16_t> touched;
  std::uint32_t epoch = 0;
  std::vector<std::pair<std::int64_t, T>> fallback;

  void ensure_dense() {
    const std::size_t w = std::size_t{1} << KernelLimits::kBucketBits;
    if (dense.size() != w) {
      dense.assign(w, T{});
      stamp.assign(w, 0);
      epoch = 0;
    }
  }
  std::uint32_t next_epoch() {
    if (++epoch == 0) {
      std::fill(stamp.begin(), stamp.end(), 0);
      epoch = 1;
    }
    return epoch;
  }
};

template <class T>
Workspace<T>& workspace() {
  thread_local Workspace<T> ws;
  return ws;
}

}  // namespace detail

/// Evaluates the target-S slice of X * Y and feeds the merged entries (E, value)
/// to `sink`. With `symmetric` (X and Y the same spectrum) the ordered-pair
/// count is formed from s1 <= S - s1 with weight 2 off the diagonal. With
/// `ordered` the entries arrive in increasing E; otherwise the order is fixed
/// but unspecified.
template <class T, class Sink>
void convolve_target(const GroupedSpectrum<T>& X, const GroupedSpectrum<T>& Y, std::int64_t S, bool symmetric, bool ordered,
                     Sink&& sink, const KernelLimits& limits = {}) {
  if (X.empty() || Y.empty()) return;
  struct Block {
    const Group<T>* x;
    const Group<T>* y;
    bool diagonal;
    T weight;
  };
  std::vector<Block> blocks;
  std::int64_t s1_lo = std::max(X.s_min(), S - Y.s_max());
  std::int64_t s1_hi = std::min(X.s_max(), S - Y.s_min());
  std::size_t count = 0;
  std::int64_t e_min = std::numeric_limits<std::int64_t>::max(), e_max = std::numeric_limits<std::int64_t>::min();
  for (std::int64_t s1 = s1_lo; s1 <= s1_hi; ++s1) {
    const std::int64_t s2 = S - s1;
    if (symmetric && s1 > s2) break;
    const Group<T>* gx = X.find(s1);
    const Group<T>* gy = Y.find(s2);
    if (!gx || !gy) continue;
    const bool diag = symmetric && s1 == s2;
    blocks.push_back({gx, gy, diag, T(symmetric && !diag ? 2.0 : 1.0)});
    count += gx->size() * gy->size();
    e_min = std::min(e_min, gx->e.front() + gy->e.front());
    e_max = std::max(e_max, gx->e.back() + gy->e.back());
  }
  if (blocks.empty()) return;

  auto generate = [&](auto&& emit) {
    for (const auto& b : blocks) {
      const auto& ex = b.x->e;
      const auto& vx = b.x->v;
      const auto& ey = b.y->e;
      const auto& vy = b.y->v;
      const std::size_t ny = ey.size();
      for (std::size_t i = 0; i < ex.size(); ++i) {
        const std::int64_t base = ex[i];
        const T w = b.weight * vx[i];
        for (std::size_t j = 0; j < ny; ++j) emit(base + ey[j], w * vy[j]);
      }
    }
  };

  constexpr int bits = KernelLimits::kBucketBits;
  const std::uint64_t range = static_cast<std::uint64_t>(e_max - e_min) + 1;
  const std::uint64_t nbuckets = ((range - 1) >> bits) + 1;
  auto& ws = detail::workspace<T>();

  if (nbuckets > 4 * count + 4096) {
    // Very sparse slice: stable sort, then merge equal keys in generation order.
    auto& f = ws.fallback;
    f.clear();
    f.reserve(count);
    generate([&](std::int64_t E, T v) { f.emplace_back(E, v); });
    std::stable_sort(f.begin(), f.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < f.size();) {
      std::size_t j = i;
      T acc{};
      while (j < f.size() && f[j].first == f[i].first) acc += f[j++].second;
      if (acc != T{}) sink(f[i].first, acc);
      i = j;
    }
    return;
  }

  ws.bucket_count.assign(nbuckets, 0);
  generate([&](std::int64_t E, T) { ++ws.bucket_count[static_cast<std::uint64_t>(E - e_min) >> bits]; });

  // Contiguous bucket ranges, each holding at most max_entries generated values
  // (a single oversized bucket forms its own chunk).
  std::vector<std::pair<std::uint64_t, std::uint64_t>> chunks;
  {
    std::uint64_t b0 = 0;
    std::size_t acc = 0;
    for (std::uint64_t b = 0; b < nbuckets; ++b) {
      if (acc > 0 && acc + ws.bucket_count[b] > limits.max_entries) {
        chunks.emplace_back(b0, b);
        b0 = b;
        acc = 0;
      }
      acc += ws.bucket_count[b];
    }
    chunks.emplace_back(b0, nbuckets);
  }

  ws.ensure_dense();
  for (const auto& [cb, ce] : chunks) {
    ws.bucket_start.assign(ce - cb + 1, 0);
    for (std::uint64_t b = cb; b < ce; ++b) ws.bucket_start[b - cb + 1] = ws.bucket_start[b - cb] + ws.bucket_count[b];
    const std::size_t total = ws.bucket_start.back();
    if (total == 0) continue;
    ws.low.resize(total);
    ws.val.resize(total);
    std::vector<std::size_t> cursor(ws.bucket_start.begin(), ws.bucket_start.end() - 1);
    const bool whole = chunks.size() == 1;
    generate([&](std::int64_t E, T v) {
      const std::uint64_t off = static_cast<std::uint64_t>(E - e_min);
      const std::uint64_t b = off >> bits;
      if (!whole && (b < cb || b >= ce)) return;
      const std::size_t pos = cursor[b - cb]++;
      ws.low[pos] = static_cast<std::uint16_t>(off & ((1u << bits) - 1));
      ws.val[pos] = v;
    });
    for (std::uint64_t b = cb; b < ce; ++b) {
      const std::size_t lo = ws.bucket_start[b - cb], hi = ws.bucket_start[b - cb + 1];
      if (lo == hi) continue;
      const std::uint32_t ep = ws.next_epoch();
      ws.touched.clear();
      for (std::size_t i = lo; i < hi; ++i) {
        const std::uint16_t l = ws.low[i];
        if (ws.stamp[l] != ep) {
          ws.stamp[l] = ep;
          ws.dense[l] = ws.val[i];
          ws.touched.push_back(l);
        } else {
          ws.dense[l] += ws.val[i];
        }
      }
      if (ordered) std::sort(ws.touched.begin(), ws.touched.end());
      const std::int64_t base = e_min + static_cast<std::int64_t>(b << bits);
      for (std::uint16_t l : ws.touched) {
        const T v = ws.dense[l];
        if (v != T{}) sink(base + static_cast<std::int64_t>(l), v);
      }
    }
  }
}

/// Full product spectrum X * Y.
template <class T>
GroupedSpectrum<T> convolve(const GroupedSpectrum<T>& X, const GroupedSpectrum<T>& Y, bool symmetric, unsigned shards = 1,
                            const KernelLimits& limits = {}) {
  if (X.empty() || Y.empty()) return {};
  GroupedSpectrum<T> out(X.s_min() + Y.s_min(), X.s_max() + Y.s_max());
  const std::size_t n = static_cast<std::size_t>(out.s_max() - out.s_min() + 1);
  parallel_for(n, shards, [&](std::size_t i) {
    const std::int64_t S = out.s_min() + static_cast<std::int64_t>(i);
    auto& g = out.at(S);
    convolve_target(X, Y, S, symmetric, true, [&](std::int64_t E, T v) {
      g.e.push_back(E);
      g.v.push_back(v);
    }, limits);
  });
  return out;
}

/// sum |(X * Y)(S, C)|^2 over all keys, reduced in increasing S.
template <class T>
double convolve_sum_sq(const GroupedSpectrum<T>& X, const GroupedSpectrum<T>& Y, bool symmetric, unsigned shards = 1,
                       const KernelLimits& limits = {}) {
  if (X.empty() || Y.empty()) return 0.0;
  const std::int64_t s_lo = X.s_min() + Y.s_min(), s_hi = X.s_max() + Y.s_max();
  std::vector<double> per_s(static_cast<std::size_t>(s_hi - s_lo + 1), 0.0);
  parallel_for(per_s.size(), shards, [&](std::size_t i) {
    CompensatedSum<double> acc;
    convolve_target(X, Y, s_lo + static_cast<std::int64_t>(i), symmetric, false, [&](std::int64_t, T v) { acc.add(sq_abs(v)); },
                    limits);
    per_s[i] = acc.value();
  });
  return ordered_sum(per_s);
}

/// Exponent of u whose spectrum squares to |u|^p.
inline int half_power(int p) {
  if (p != 2 && p != 4 && p != 6 && p != 8) throw std::invalid_argument("exact counting supports p in {2, 4, 6, 8}");
  return p / 2;
}

/// int_{T^2} |e^{t d^3} u|^p for lambda = 1 data, i.e. sum |u^{p/2} coefficients|^2.
template <class T>
double lp_power(const GroupedSpectrum<T>& single, int p, unsigned shards = 1, const KernelLimits& limits = {}) {
  switch (half_power(p)) {
    case 1:
      return single.sum_sq();
    case 2:
      return convolve_sum_sq(single, single, true, shards, limits);
    case 3: {
      const auto pair = convolve(single, single, true, shards, limits);
      return convolve_sum_sq(pair, single, false, shards, limits);
    }
    default: {
      const auto pair = convolve(single, single, true, shards, limits);
      return convolve_sum_sq(pair, pair, true, shards, limits);
    }
  }
}

/// Value and complex gradient of F(a) = int |u|^{2m}, m in {2, 3, 4}:
/// grad_k = dF/dRe a_k + i dF/dIm a_k = 2m sum_{S,C} A(S,C) conj(B(S-k, C-k^3))
/// where A, B are the spectra of u^m and u^{m-1}. When `keys` is nonempty the
/// gradient is reported at those frequencies (zero coefficients included).
struct ValueGradient {
  double value = 0.0;
  std::vector<std::int64_t> k;
  std::vector<cplx> grad;
};

inline ValueGradient lp_power_gradient(const lattice::CoeffVector& u, int p, unsigned shards = 1, const KernelLimits& limits = {},
                                       const std::vector<std::int64_t>& keys = {}) {
  const int m = half_power(p);
  if (m < 2) throw std::invalid_argument("gradient path supports p in {4, 6, 8}");
  ValueGradient out;
  if (keys.empty()) {
    for (const auto& [k, a] : u) out.k.push_back(k);
  } else {
    out.k = keys;
  }
  out.grad.assign(out.k.size(), cplx{});
  if (u.empty()) return out;

  const auto single = singles<cplx>(u);
  GroupedSpectrum<cplx> pair, triple;
  if (m >= 3) pair = convolve(single, single, true, shards, limits);
  if (m == 4) triple = convolve(pair, single, false, shards, limits);
  const GroupedSpectrum<cplx>& B = m == 2 ? single : m == 3 ? pair : triple;

  // A per target S, materialized only for that S.
  std::int64_t s_lo = 0, s_hi = 0;
  if (m == 2) s_lo = 2 * single.s_min(), s_hi = 2 * single.s_max();
  if (m == 3) s_lo = pair.s_min() + single.s_min(), s_hi = pair.s_max() + single.s_max();
  if (m == 4) s_lo = 2 * pair.s_min(), s_hi = 2 * pair.s_max();

  const std::size_t nk = out.k.size();
  std::vector<std::int64_t> shift(nk);
  for (std::size_t i = 0; i < nk; ++i) shift[i] = (lattice::cube(out.k[i]) - out.k[i]) / 6;

  const std::size_t ns = static_cast<std::size_t>(s_hi - s_lo + 1);
  std::vector<double> per_s_value(ns, 0.0);
  std::vector<std::vector<cplx>> per_s_grad(ns);
  parallel_for(ns, shards, [&](std::size_t idx) {
    const std::int64_t S = s_lo + static_cast<std::int64_t>(idx);
    Group<cplx> A;
    auto sink = [&](std::int64_t E, cplx v) {
      A.e.push_back(E);
      A.v.push_back(v);
    };
    if (m == 2) convolve_target(single, single, S, true, true, sink, limits);
    if (m == 3) convolve_target(pair, single, S, false, true, sink, limits);
    if (m == 4) convolve_target(pair, pair, S, true, true, sink, limits);
    if (A.empty()) return;
    CompensatedSum<double> val;
    for (const auto& v : A.v) val.add(std::norm(v));
    per_s_value[idx] = val.value();
    auto& g = per_s_grad[idx];
    g.assign(nk, cplx{});
    for (std::size_t i = 0; i < nk; ++i) {
      const Group<cplx>* b = B.find(S - out.k[i]);
      if (!b) continue;
      CompensatedSum<cplx> acc;
      auto it = A.e.begin();
      for (std::size_t j = 0; j < b->size(); ++j) {
        const std::int64_t target = b->e[j] + shift[i];
        it = std::lower_bound(it, A.e.end(), target);
        if (it == A.e.end()) break;
        if (*it == target) acc.add(A.v[static_cast<std::size_t>(it - A.e.begin())] * std::conj(b->v[j]));
      }
      g[i] = acc.value();
    }
  });
  out.value = ordered_sum(per_s_value);
  for (std::size_t i = 0; i < nk; ++i) {
    CompensatedSum<cplx> acc;
    for (std::size_t s = 0; s < ns; ++s)
      if (!per_s_grad[s].empty()) acc.add(per_s_grad[s][i]);
    out.grad[i] = static_cast<double>(2 * m) * acc.value();
  }
  return out;
}

}  // namespace strichartz::counting

#pragma once

// Shared plumbing: error types, dyadic helpers, compensated sums, seeded
// generators and the deterministic shard runner.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace strichartz {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Raised when an input would exceed a documented cost or overflow guard.
class guard_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline bool is_dyadic(std::int64_t n) { return n >= 1 && std::has_single_bit(static_cast<std::uint64_t>(n)); }

inline void require_dyadic(std::int64_t n, const char* what) {
  if (!is_dyadic(n)) throw std::invalid_argument(std::string(what) + " must be a power of two, got " + std::to_string(n));
}

/// e^{2 pi i theta}
inline cplx unit_phase(double theta) {
  const double a = kTwoPi * theta;
  return {std::cos(a), std::sin(a)};
}

/// <x> = (1 + x^2)^{1/2}
inline double japanese(double x) { return std::sqrt(1.0 + x * x); }

/// Neumaier compensated summation.
template <class T = double>
class CompensatedSum {
 public:
  void add(T x) {
    const T t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }

 private:
  T sum_{};
  T comp_{};
};

template <>
class CompensatedSum<cplx> {
 public:
  void add(cplx x) {
    re_.add(x.real());
    im_.add(x.imag());
  }
  cplx value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum<double> re_, im_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Splittable seed: every consumer derives a named child, so no module ever
/// draws from an ambient generator.
class SeedTree {
 public:
  explicit SeedTree(std::uint64_t seed) : state_(splitmix64(seed)) {}

  SeedTree derive(std::string_view name) const { return SeedTree(state_ ^ fnv1a(name), 0); }
  SeedTree derive(std::uint64_t index) const { return SeedTree(splitmix64(state_ + 0x632be59bd9b4e019ULL * (index + 1)), 0); }

  std::uint64_t value() const { return state_; }
  std::mt19937_64 engine() const { return std::mt19937_64(state_); }

 private:
  SeedTree(std::uint64_t raw, int) : state_(splitmix64(raw)) {}
  std::uint64_t state_;
};

/// Runs job(i) for i in [0, n) over `shards` worker threads with a static
/// interleaved assignment. Callers write results into slot i, so any
/// reduction done afterwards in index order is independent of the shard count.
inline void parallel_for(std::size_t n, unsigned shards, const std::function<void(std::size_t)>& job) {
  shards = std::max(1u, shards);
  if (shards == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(shards, n));
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) job(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  pool.clear();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Sum of doubles in index order with compensation.
inline double ordered_sum(const std::vector<double>& xs) {
  CompensatedSum<double> s;
  for (double x : xs) s.add(x);
  return s.value();
}

inline std::vector<std::int64_t> dyadic_range(std::int64_t lo, std::int64_t hi) {
  std::vector<std::int64_t> out;
  for (std::int64_t n = lo; n <= hi; n *= 2) out.push_back(n);
  return out;
}

}  // namespace strichartz

#pragma once

#include <complex>
#include <cstddef>
#include <mutex>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

#include "strichartz/common.hpp"

namespace strichartz {

namespace detail {
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

/// Complex 1D DFT of fixed length owning its buffer. Forward uses e^{-2 pi i jk/n},
/// backward e^{+2 pi i jk/n}; neither is normalized.
class FftPlan {
 public:
  FftPlan(std::size_t n, int sign) : n_(n) {
    if (n == 0) throw std::invalid_argument("FFT length must be positive");
    buf_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    if (!buf_) throw std::bad_alloc();
    std::lock_guard lock(detail::fftw_planner_mutex());
    plan_ = fftw_plan_dft_1d(static_cast<int>(n), buf_, buf_, sign, FFTW_ESTIMATE);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  ~FftPlan() {
    {
      std::lock_guard lock(detail::fftw_planner_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(buf_);
  }

  std::size_t size() const { return n_; }
  cplx* data() { return reinterpret_cast<cplx*>(buf_); }
  const cplx* data() const { return reinterpret_cast<const cplx*>(buf_); }
  cplx& operator[](std::size_t i) { return data()[i]; }

  void zero() {
    for (std::size_t i = 0; i < n_; ++i) data()[i] = cplx{};
  }
  void execute() { fftw_execute(plan_); }

 private:
  std::size_t n_;
  fftw_complex* buf_ = nullptr;
  fftw_plan plan_ = nullptr;
};

inline std::size_t next_pow2_above(std::size_t n) {
  std::size_t m = 1;
  while (m <= n) m <<= 1;
  return m;
}

}  // namespace strichartz

#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <new>
#include <span>

#include "wave_grid.hpp"

namespace deconv {

/// fftw_malloc-backed array. FFTW selects SIMD codelets by alignment, so all
/// transform buffers come from here to keep results bit-reproducible.
template <typename T>
class AlignedBuffer {
 public:
  AlignedBuffer() = default;
  explicit AlignedBuffer(std::size_t n)
      : ptr_(static_cast<T*>(fftw_malloc(sizeof(T) * n))), size_(n) {
    if (!ptr_) throw std::bad_alloc();
    for (std::size_t i = 0; i < n; ++i) ptr_[i] = T{};
  }
  AlignedBuffer(AlignedBuffer&& o) noexcept : ptr_(o.ptr_), size_(o.size_) {
    o.ptr_ = nullptr;
    o.size_ = 0;
  }
  AlignedBuffer& operator=(AlignedBuffer&& o) noexcept {
    std::swap(ptr_, o.ptr_);
    std::swap(size_, o.size_);
    return *this;
  }
  AlignedBuffer(const AlignedBuffer&) = delete;
  AlignedBuffer& operator=(const AlignedBuffer&) = delete;
  ~AlignedBuffer() {
    if (ptr_) fftw_free(ptr_);
  }

  T* data() noexcept { return ptr_; }
  const T* data() const noexcept { return ptr_; }
  std::size_t size() const noexcept { return size_; }
  T& operator[](std::size_t i) noexcept { return ptr_[i]; }
  const T& operator[](std::size_t i) const noexcept { return ptr_[i]; }
  std::span<T> span() noexcept { return {ptr_, size_}; }

 private:
  T* ptr_ = nullptr;
  std::size_t size_ = 0;
};

using RealBuffer = AlignedBuffer<double>;
using ComplexBuffer = AlignedBuffer<std::complex<double>>;

namespace detail {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

// The FFTW planner is not thread-safe; executing a finished plan is.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

inline const PlanPair& plans_for(int K) {
  static std::map<int, PlanPair> cache;
  std::lock_guard lock(planner_mutex());
  auto it = cache.find(K);
  if (it != cache.end()) return it->second;
  const std::size_t nreal = std::size_t(K) * K * K;
  const std::size_t nspec = std::size_t(K) * K * (K / 2 + 1);
  RealBuffer r(nreal);
  ComplexBuffer c(nspec);
  PlanPair p;
  p.forward = fftw_plan_dft_r2c_3d(K, K, K, r.data(), reinterpret_cast<fftw_complex*>(c.data()),
                                   FFTW_ESTIMATE);
  p.inverse = fftw_plan_dft_c2r_3d(K, K, K, reinterpret_cast<fftw_complex*>(c.data()), r.data(),
                                   FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
  return cache.emplace(K, p).first->second;
}

}  // namespace detail

/// 3D real <-> half-spectrum transforms on the grid layout.
///
/// forward: coefficients = (1/K^3) sum_x f(x) exp(-i k.x)
/// inverse: f(x) = sum_k coeff(k) exp(i k.x)   (input is overwritten)
class Fft3d {
 public:
  explicit Fft3d(int K) : K_(K), plans_(&detail::plans_for(K)) {}

  void forward(RealBuffer& in, ComplexBuffer& out) const {
    fftw_execute_dft_r2c(plans_->forward, in.data(),
                         reinterpret_cast<fftw_complex*>(out.data()));
    const double scale = 1.0 / (double(K_) * K_ * K_);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= scale;
  }

  void inverse(ComplexBuffer& in, RealBuffer& out) const {
    fftw_execute_dft_c2r(plans_->inverse, reinterpret_cast<fftw_complex*>(in.data()),
                         out.data());
  }

  int resolution() const noexcept { return K_; }

 private:
  int K_;
  const detail::PlanPair* plans_;
};

}  // namespace deconv

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"
#include "wave_grid.hpp"

namespace deconv {

using Complex = std::complex<double>;

/// Exponent s of the H_s scale.
struct SobolevIndex {
  double s;

  explicit SobolevIndex(double value) : s(value) {
    if (!std::isfinite(value)) throw ValidationError("Sobolev index must be finite");
  }
};

/// Fourier coefficients of a real, zero-mean vector field on a WaveGrid,
///   w(x) = sum_k w_hat(k) exp(i k.x),
/// stored as three half-spectrum component arrays. Dealiased-out modes and
/// k = 0 are held at zero by normalize().
class SpectralVectorField {
 public:
  SpectralVectorField() = default;
  explicit SpectralVectorField(GridPtr grid)
      : grid_(std::move(grid)), data_(3 * grid_->stored_modes(), Complex{}) {}

  const GridPtr& grid_ptr() const noexcept { return grid_; }
  const WaveGrid& grid() const noexcept { return *grid_; }
  std::size_t modes() const noexcept { return grid_ ? grid_->stored_modes() : 0; }

  Complex& at(int c, std::size_t idx) { return data_[c * modes() + idx]; }
  const Complex& at(int c, std::size_t idx) const { return data_[c * modes() + idx]; }

  std::array<Complex, 3> mode(std::size_t idx) const {
    return {at(0, idx), at(1, idx), at(2, idx)};
  }
  void set_mode(std::size_t idx, const std::array<Complex, 3>& v) {
    for (int c = 0; c < 3; ++c) at(c, idx) = v[c];
  }

  std::span<Complex> component(int c) { return {data_.data() + c * modes(), modes()}; }
  std::span<const Complex> component(int c) const {
    return {data_.data() + c * modes(), modes()};
  }
  std::span<Complex> raw() { return data_; }
  std::span<const Complex> raw() const { return data_; }

  /// Sets the coefficient at wavevector k and its conjugate partner.
  void set_wavevector(const std::array<int, 3>& k, const std::array<Complex, 3>& v) {
    bool conj = false;
    const auto idx = grid_->find(k, &conj);
    if (idx < 0) throw ValidationError("wavevector outside the lattice");
    std::array<Complex, 3> stored = v;
    if (conj)
      for (auto& x : stored) x = std::conj(x);
    set_mode(std::size_t(idx), stored);
    const auto p = grid_->partner(std::size_t(idx));
    if (p >= 0 && p != idx)
      for (int c = 0; c < 3; ++c) at(c, std::size_t(p)) = std::conj(stored[c]);
  }

  /// Zeroes k = 0 and every mode dropped by the dealias rule, and makes the
  /// k3 = 0 plane exactly conjugate-symmetric.
  void normalize() {
    const WaveGrid& g = *grid_;
    for (std::size_t idx = 0; idx < modes(); ++idx) {
      if (!g.active(idx)) {
        for (int c = 0; c < 3; ++c) at(c, idx) = Complex{};
        continue;
      }
      const auto p = g.partner(idx);
      if (p < 0) continue;
      const auto& k = g.wavevector(idx);
      if (k[0] > 0 || (k[0] == 0 && k[1] > 0))
        for (int c = 0; c < 3; ++c) at(c, std::size_t(p)) = std::conj(at(c, idx));
    }
  }

  bool all_finite() const {
    for (const auto& z : data_)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
  }

  SpectralVectorField& operator+=(const SpectralVectorField& o) {
    check_same_grid(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  SpectralVectorField& operator-=(const SpectralVectorField& o) {
    check_same_grid(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  SpectralVectorField& operator*=(double a) {
    for (auto& z : data_) z *= a;
    return *this;
  }
  /// this += a * x
  SpectralVectorField& axpy(double a, const SpectralVectorField& x) {
    check_same_grid(x);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += a * x.data_[i];
    return *this;
  }

  friend SpectralVectorField operator+(SpectralVectorField a, const SpectralVectorField& b) {
    return a += b;
  }
  friend SpectralVectorField operator-(SpectralVectorField a, const SpectralVectorField& b) {
    return a -= b;
  }
  friend SpectralVectorField operator*(double s, SpectralVectorField a) { return a *= s; }

  /// Bitwise coefficient equality on equal grids.
  friend bool operator==(const SpectralVectorField& a, const SpectralVectorField& b) {
    if (!a.grid_ || !b.grid_) return a.grid_ == b.grid_;
    return *a.grid_ == *b.grid_ && a.data_ == b.data_;
  }

  void check_same_grid(const SpectralVectorField& o) const {
    if (!grid_ || !o.grid_ || !(*grid_ == *o.grid_))
      throw ValidationError("fields live on different grids");
  }

 private:
  GridPtr grid_;
  std::vector<Complex> data_;
};

/// Multiplies every mode by symbol(|k|^2).
template <typename Symbol>
SpectralVectorField apply_symbol(SpectralVectorField w, Symbol&& symbol) {
  const WaveGrid& g = w.grid();
  for (std::size_t idx = 0; idx < w.modes(); ++idx) {
    const double m = symbol(g.k2(idx));
    for (int c = 0; c < 3; ++c) w.at(c, idx) *= m;
  }
  return w;
}

/// Real L2 inner product in the lattice convention sum_k conj(a_hat).b_hat.
inline double inner_product(const SpectralVectorField& a, const SpectralVectorField& b) {
  a.check_same_grid(b);
  const WaveGrid& g = a.grid();
  double sum = 0.0;
  for (std::size_t idx = 0; idx < a.modes(); ++idx) {
    if (g.k2(idx) == 0.0) continue;
    double m = 0.0;
    for (int c = 0; c < 3; ++c) {
      const Complex x = a.at(c, idx), y = b.at(c, idx);
      m += x.real() * y.real() + x.imag() * y.imag();
    }
    sum += g.weight(idx) * m;
  }
  return sum;
}

/// max_k |k.w_hat(k)| / (|k| |w_hat(k)|) over nonzero modes; 0 for a
/// divergence-free field.
inline double max_relative_divergence(const SpectralVectorField& w) {
  const WaveGrid& g = w.grid();
  double worst = 0.0;
  for (std::size_t idx = 0; idx < w.modes(); ++idx) {
    const double k2 = g.k2(idx);
    if (k2 == 0.0) continue;
    const auto& k = g.wavevector(idx);
    Complex div{};
    double mag2 = 0.0;
    for (int c = 0; c < 3; ++c) {
      div += double(k[c]) * w.at(c, idx);
      mag2 += std::norm(w.at(c, idx));
    }
    if (mag2 == 0.0) continue;
    worst = std::max(worst, std::abs(div) / std::sqrt(k2 * mag2));
  }
  return worst;
}

}  // namespace deconv

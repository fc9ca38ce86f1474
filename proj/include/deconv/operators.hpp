#pragma once

#include <cmath>
#include <limits>

#include "fft.hpp"
#include "spectral_field.hpp"

namespace deconv {

/// (sum_k |k|^{2s} |w_hat(k)|^2)^{1/2} over k != 0.
inline double sobolev_norm(const SpectralVectorField& w, SobolevIndex index) {
  const WaveGrid& g = w.grid();
  double sum = 0.0;
  for (std::size_t idx = 0; idx < w.modes(); ++idx) {
    const double k2 = g.k2(idx);
    if (k2 == 0.0) continue;
    double m = 0.0;
    for (int c = 0; c < 3; ++c) m += std::norm(w.at(c, idx));
    if (m == 0.0) continue;
    const double wk = index.s == 0.0 ? 1.0 : index.s == 1.0 ? k2 : index.s == 2.0 ? k2 * k2
                                                                      : std::pow(k2, index.s);
    sum += g.weight(idx) * wk * m;
  }
  return std::sqrt(sum);
}

inline double sobolev_norm(const SpectralVectorField& w, double s) {
  return sobolev_norm(w, SobolevIndex{s});
}

/// Squared H_s norm; avoids the sqrt round trip in energy bookkeeping.
inline double sobolev_norm_sq(const SpectralVectorField& w, double s) {
  const double n = sobolev_norm(w, SobolevIndex{s});
  return n * n;
}

/// Helmholtz-Leray projection: w_hat -> w_hat - k (k.w_hat)/|k|^2.
inline SpectralVectorField leray_project(SpectralVectorField w) {
  const WaveGrid& g = w.grid();
  for (std::size_t idx = 0; idx < w.modes(); ++idx) {
    const double k2 = g.k2(idx);
    if (k2 == 0.0) {
      for (int c = 0; c < 3; ++c) w.at(c, idx) = Complex{};
      continue;
    }
    const auto& k = g.wavevector(idx);
    Complex kw{};
    for (int c = 0; c < 3; ++c) kw += double(k[c]) * w.at(c, idx);
    kw /= k2;
    for (int c = 0; c < 3; ++c) w.at(c, idx) -= double(k[c]) * kw;
  }
  return w;
}

/// Stokes operator A = -P_L Laplacian; on periodic divergence-free fields
/// w_hat -> |k|^2 w_hat.
inline SpectralVectorField stokes_apply(SpectralVectorField w) {
  return apply_symbol(std::move(w), [](double k2) { return k2; });
}

/// Smallest eigenvalue of A on the retained spectrum.
inline double smallest_eigenvalue(const WaveGrid& g) {
  double lambda = std::numeric_limits<double>::infinity();
  for (std::size_t idx = 0; idx < g.stored_modes(); ++idx)
    if (g.active(idx)) lambda = std::min(lambda, g.k2(idx));
  if (!std::isfinite(lambda)) throw ValidationError("grid retains no nonzero modes");
  return lambda;
}

/// Scratch storage for pseudo-spectral products on one grid. Not shareable
/// between threads; each solver owns one.
class ProductWorkspace {
 public:
  explicit ProductWorkspace(const WaveGrid& g)
      : fft_(g.resolution()),
        nreal_(g.real_points()),
        nspec_(g.stored_modes()),
        u_{RealBuffer(nreal_), RealBuffer(nreal_), RealBuffer(nreal_)},
        grad_(nreal_),
        acc_(nreal_),
        spec_(nspec_) {}

  /// Dealiased spectral representation of (u.grad) v, not projected.
  SpectralVectorField convective(const SpectralVectorField& u, const SpectralVectorField& v) {
    u.check_same_grid(v);
    const WaveGrid& g = u.grid();
    for (int i = 0; i < 3; ++i) to_real(u.component(i), u_[i]);
    SpectralVectorField out(u.grid_ptr());
    for (int j = 0; j < 3; ++j) {
      const auto vj = v.component(j);
      for (int i = 0; i < 3; ++i) {
        for (std::size_t idx = 0; idx < nspec_; ++idx) {
          const double ki = double(g.wavevector(idx)[i]);
          spec_[idx] = Complex{-ki * vj[idx].imag(), ki * vj[idx].real()};
        }
        fft_.inverse(spec_, grad_);
        if (i == 0) {
          for (std::size_t x = 0; x < nreal_; ++x) acc_[x] = u_[0][x] * grad_[x];
        } else {
          for (std::size_t x = 0; x < nreal_; ++x) acc_[x] += u_[i][x] * grad_[x];
        }
      }
      fft_.forward(acc_, spec_);
      auto oj = out.component(j);
      for (std::size_t idx = 0; idx < nspec_; ++idx) oj[idx] = spec_[idx];
    }
    out.normalize();
    return out;
  }

  /// Grid-point values of one component.
  void to_real(std::span<const Complex> coeffs, RealBuffer& out) {
    for (std::size_t idx = 0; idx < nspec_; ++idx) spec_[idx] = coeffs[idx];
    fft_.inverse(spec_, out);
  }

 private:
  Fft3d fft_;
  std::size_t nreal_;
  std::size_t nspec_;
  RealBuffer u_[3];
  RealBuffer grad_;
  RealBuffer acc_;
  ComplexBuffer spec_;
};

/// b(u, v, w) = sum_{i,j} <u_i d_i v_j, w_j>, normalized by the box volume
/// so that it pairs with the lattice-sum norms.
inline double trilinear_b(const SpectralVectorField& u, const SpectralVectorField& v,
                          const SpectralVectorField& w, ProductWorkspace& ws) {
  return inner_product(w, ws.convective(u, v));
}

inline double trilinear_b(const SpectralVectorField& u, const SpectralVectorField& v,
                          const SpectralVectorField& w) {
  ProductWorkspace ws(u.grid());
  return trilinear_b(u, v, w, ws);
}

/// P_L of the dealiased (u.grad) w.
inline SpectralVectorField nonlinear_term(const SpectralVectorField& u,
                                          const SpectralVectorField& w, ProductWorkspace& ws) {
  return leray_project(ws.convective(u, w));
}

inline SpectralVectorField nonlinear_term(const SpectralVectorField& u,
                                          const SpectralVectorField& w) {
  ProductWorkspace ws(u.grid());
  return nonlinear_term(u, w, ws);
}

}  // namespace deconv

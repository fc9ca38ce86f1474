#pragma once

#include <cmath>
#include <map>
#include <string>

#include "operators.hpp"
#include "spectral_field.hpp"

namespace deconv {

/// Largest supported deconvolution order.
inline constexpr int kMaxDeconvolutionOrder = 64;

/// Filter width and Van Cittert order defining G, D_N and H_N = D_N G.
struct FilterParams {
  double delta = 1.0;
  int order = 0;

  FilterParams() = default;
  FilterParams(double d, int n) : delta(d), order(n) { validate(); }

  void validate() const {
    if (!(delta > 0.0) || !std::isfinite(delta))
      throw ValidationError("filter width delta must be positive, got " + std::to_string(delta));
    if (order < 0 || order > kMaxDeconvolutionOrder)
      throw ValidationError("deconvolution order N must lie in [0, " +
                            std::to_string(kMaxDeconvolutionOrder) + "], got " +
                            std::to_string(order));
  }
};

/// Transfer function of the Helmholtz filter, 1 / (1 + delta^2 |k|^2).
inline double g_symbol(double k2, double delta) {
  if (!(delta > 0.0)) throw ValidationError("filter width delta must be positive");
  if (k2 < 0.0) throw ValidationError("|k|^2 must be nonnegative");
  return 1.0 / (1.0 + delta * delta * k2);
}

/// Symbol of H_N: 1 - (delta^2 k2 / (1 + delta^2 k2))^{N+1}.
inline double hn_symbol(double k2, double delta, int order) {
  (void)FilterParams{delta, order};
  if (k2 < 0.0) throw ValidationError("|k|^2 must be nonnegative");
  const double a = delta * delta * k2;
  if (a == 0.0) return 1.0;
  const double r = a / (1.0 + a);
  const double p = std::pow(r, order + 1);
  if (p <= 0.5) return 1.0 - p;
  // Near r^{N+1} = 1 the subtraction cancels; expm1 keeps relative accuracy.
  return -std::expm1(double(order + 1) * -std::log1p(1.0 / a));
}

/// Helmholtz filter: solves -delta^2 Lap wbar + wbar + grad r = w. The
/// pressure-like r vanishes for divergence-free data, so wbar_hat = G_hat w_hat.
inline SpectralVectorField helmholtz_filter(SpectralVectorField w, double delta) {
  const double d2 = delta * delta;
  if (!(delta > 0.0)) throw ValidationError("filter width delta must be positive");
  return apply_symbol(std::move(w), [d2](double k2) { return 1.0 / (1.0 + d2 * k2); });
}

/// H_N via the closed-form symbol.
inline SpectralVectorField truncation_hn(SpectralVectorField w, const FilterParams& p) {
  p.validate();
  return apply_symbol(std::move(w), [&p](double k2) { return hn_symbol(k2, p.delta, p.order); });
}

inline SpectralVectorField truncation_hn(SpectralVectorField w, double delta, int order) {
  return truncation_hn(std::move(w), FilterParams{delta, order});
}

/// H_N via the explicit series: D_N wbar = sum_{n=0}^N (I - G)^n wbar.
inline SpectralVectorField van_cittert_apply(const SpectralVectorField& w, const FilterParams& p) {
  p.validate();
  SpectralVectorField term = helmholtz_filter(w, p.delta);
  SpectralVectorField sum = term;
  for (int n = 1; n <= p.order; ++n) {
    term -= helmholtz_filter(term, p.delta);
    sum += term;
  }
  return sum;
}

inline SpectralVectorField van_cittert_apply(const SpectralVectorField& w, double delta, int order) {
  return van_cittert_apply(w, FilterParams{delta, order});
}

/// Admissible constant in ||H_N w||_{s+2} <= C ||w||_s: H_N_hat <= (N+1) G_hat
/// and |k|^2 G_hat < 1/delta^2.
inline double admissible_smoothing_constant(const FilterParams& p) {
  p.validate();
  return double(p.order + 1) / (p.delta * p.delta);
}

/// Sharpest grid constant, sup over retained modes of |k|^2 H_N_hat(k).
/// Throws std::logic_error if it exceeds admissible_smoothing_constant.
inline double smoothing_constant(const FilterParams& p, const WaveGrid& g) {
  p.validate();
  double sup = 0.0;
  for (std::size_t idx = 0; idx < g.stored_modes(); ++idx) {
    if (!g.active(idx)) continue;
    const double k2 = g.k2(idx);
    sup = std::max(sup, k2 * hn_symbol(k2, p.delta, p.order));
  }
  if (sup > admissible_smoothing_constant(p))
    throw std::logic_error("measured smoothing constant exceeds (N+1)/delta^2");
  return sup;
}

/// G_hat and H_N_hat at each distinct |k|^2 of the retained spectrum.
struct SymbolTable {
  struct Entry {
    double g;
    double hn;
  };
  FilterParams params;
  std::map<double, Entry> by_k2;

  SymbolTable(const FilterParams& p, const WaveGrid& g) : params(p) {
    p.validate();
    for (std::size_t idx = 0; idx < g.stored_modes(); ++idx) {
      if (!g.mask(idx)) continue;
      const double k2 = g.k2(idx);
      if (!by_k2.contains(k2)) by_k2.emplace(k2, Entry{g_symbol(k2, p.delta), hn_symbol(k2, p.delta, p.order)});
    }
  }

  /// Table over the integer range 0..k2_max, independent of any grid.
  SymbolTable(const FilterParams& p, int k2_max) : params(p) {
    p.validate();
    for (int k2 = 0; k2 <= k2_max; ++k2)
      by_k2.emplace(double(k2), Entry{g_symbol(k2, p.delta), hn_symbol(k2, p.delta, p.order)});
  }
};

}  // namespace deconv

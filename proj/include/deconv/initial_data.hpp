#pragma once

#include <cmath>
#include <random>

#include "config.hpp"
#include "filter.hpp"
#include "io.hpp"
#include "operators.hpp"

namespace deconv {

namespace detail {

inline bool canonical_half(const WaveGrid& g, std::size_t idx) {
  if (g.partner(idx) < 0) return true;
  const auto& k = g.wavevector(idx);
  return k[0] > 0 || (k[0] == 0 && k[1] > 0);
}

}  // namespace detail

/// Independent standard complex Gaussians on every retained mode; projected
/// onto divergence-free fields when requested. Deterministic per seed.
inline SpectralVectorField random_field(const GridPtr& grid, std::uint64_t seed,
                                        bool divergence_free = true) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  SpectralVectorField w(grid);
  for (std::size_t idx = 0; idx < w.modes(); ++idx) {
    if (!grid->active(idx) || !detail::canonical_half(*grid, idx)) continue;
    for (int c = 0; c < 3; ++c) {
      const double re = normal(rng);
      const double im = normal(rng);
      w.at(c, idx) = Complex{re, im};
    }
  }
  w.normalize();
  return divergence_free ? leray_project(std::move(w)) : w;
}

/// Divergence-free field with isotropic shell spectrum
/// E(kappa) ~ kappa^exponent exp(-2 kappa^2 / peak^2) on |k| <= cutoff.
inline SpectralVectorField random_spectrum_field(const GridPtr& grid, std::uint64_t seed,
                                                 double exponent, double peak, double cutoff) {
  const WaveGrid& g = *grid;
  if (peak <= 0.0) peak = g.resolution() / 6.0;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  SpectralVectorField w(grid);
  for (std::size_t idx = 0; idx < w.modes(); ++idx) {
    if (!g.active(idx) || !detail::canonical_half(g, idx)) continue;
    std::array<Complex, 3> v;
    for (auto& x : v) {
      const double re = normal(rng);
      const double im = normal(rng);
      x = Complex{re, im};
    }
    const double kappa = std::sqrt(g.k2(idx));
    if (cutoff > 0.0 && kappa > cutoff) continue;
    const double energy = std::pow(kappa, exponent) * std::exp(-2.0 * kappa * kappa / (peak * peak));
    const double amp = std::sqrt(energy / (4.0 * M_PI * kappa * kappa));
    for (auto& x : v) x *= amp;
    w.set_mode(idx, v);
  }
  w.normalize();
  return leray_project(std::move(w));
}

/// Builds an initial condition or forcing field from its spec. Random
/// spectra are rescaled so the H_0 norm of the field (or of H_N of it when
/// filtered_norm is set) equals the target.
inline SpectralVectorField generate_ic(const FieldSpec& spec, const GridPtr& grid,
                                       const FilterParams& filter) {
  switch (spec.kind) {
    case FieldSpec::Kind::zero:
      return SpectralVectorField(grid);
    case FieldSpec::Kind::single_mode: {
      const auto& k = spec.k;
      const auto& a = spec.amplitude;
      const double dot = k[0] * a[0] + k[1] * a[1] + k[2] * a[2];
      const double kn = std::sqrt(double(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]));
      const double an = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
      if (kn == 0.0) throw ValidationError("single_mode wavevector must be nonzero");
      if (std::abs(dot) > 1e-12 * kn * an)
        throw ValidationError("single_mode amplitude is not orthogonal to k");
      const auto idx = grid->find(k);
      if (idx < 0 || !grid->active(std::size_t(idx)))
        throw ValidationError("single_mode wavevector is not a retained mode");
      SpectralVectorField w(grid);
      w.set_wavevector(k, {Complex{a[0]}, Complex{a[1]}, Complex{a[2]}});
      return w;
    }
    case FieldSpec::Kind::random_spectrum: {
      SpectralVectorField w = random_spectrum_field(grid, spec.seed, spec.exponent, spec.peak, spec.cutoff);
      const double current = spec.filtered_norm ? sobolev_norm(truncation_hn(w, filter), 0.0)
                                                : sobolev_norm(w, 0.0);
      if (spec.norm == 0.0) return SpectralVectorField(grid);
      if (current == 0.0) throw ValidationError("random spectrum has no energy on the retained modes");
      w *= spec.norm / current;
      return w;
    }
    case FieldSpec::Kind::snapshot: {
      Snapshot s = read_snapshot(spec.path);
      check_snapshot_grid(s, *grid);
      // Rebind to the caller's grid object.
      SpectralVectorField w(grid);
      for (int c = 0; c < 3; ++c)
        for (std::size_t idx = 0; idx < w.modes(); ++idx) w.at(c, idx) = s.field.at(c, idx);
      return w;
    }
  }
  throw ValidationError("unknown field kind");
}

}  // namespace deconv

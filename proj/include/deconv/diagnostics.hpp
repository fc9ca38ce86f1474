#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "solver.hpp"

namespace deconv {

/// Radius of the steady-state energy ball, ||f|| / (nu lambda1).
inline double rho0(double nu, double lambda1, double f_norm) {
  if (!(nu > 0.0)) throw ValidationError("nu must be positive");
  if (!(lambda1 > 0.0)) throw ValidationError("lambda1 must be positive");
  if (f_norm < 0.0) throw ValidationError("forcing norm must be nonnegative");
  return f_norm / (nu * lambda1);
}

/// Inputs of the H_0 absorbing-ball estimate. rho0_prime is the chosen
/// absorbing radius (> rho0), R bounds the initial data.
struct AbsorbingParams {
  double nu = 1.0;
  double lambda1 = 1.0;
  double f_norm = 0.0;
  double rho0_prime = 1.0;
  double R = 1.0;

  double rho0() const { return deconv::rho0(nu, lambda1, f_norm); }
};

/// ||w0||^2 e^{-nu lambda1 t} + rho0^2 (1 - e^{-nu lambda1 t})
inline double absorbing_bound(double t, double w0_norm2, const AbsorbingParams& p) {
  if (t < 0.0) throw ValidationError("time must be nonnegative");
  const double r0 = p.rho0();
  return absorbing_bound_value(t, w0_norm2, p.nu, p.lambda1, r0 * r0);
}

/// T0 = ln(R^2 / (rho0'^2 - rho0^2)) / (nu lambda1), clamped at 0.
inline double absorbing_time(const AbsorbingParams& p) {
  const double r0 = p.rho0();
  if (!(p.rho0_prime > r0))
    throw ValidationError("absorbing radius rho0' must exceed rho0");
  const double gap = p.rho0_prime * p.rho0_prime - r0 * r0;
  const double ratio = p.R * p.R / gap;
  if (ratio <= 1.0) return 0.0;
  return std::log(ratio) / (p.nu * p.lambda1);
}

/// Window length r and constants of the uniform Gronwall lemma.
struct GronwallConstants {
  double r = 1.0;
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
};

/// (k1/r + k3) e^{k2}
inline double uniform_gronwall(const GronwallConstants& c) {
  if (!(c.r > 0.0)) throw ValidationError("window length r must be positive");
  return (c.k1 / c.r + c.k3) * std::exp(c.k2);
}

namespace detail {

inline double interpolate_h1(const Trajectory& traj, double t) {
  const auto& s = traj.samples;
  auto it = std::lower_bound(s.begin(), s.end(), t,
                             [](const TrajectorySample& a, double v) { return a.t < v; });
  if (it == s.end()) return s.back().h1_sq;
  if (it->t == t || it == s.begin()) return it->h1_sq;
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double th = (t - a.t) / (b.t - a.t);
  return a.h1_sq + th * (b.h1_sq - a.h1_sq);
}

inline constexpr double kTimeSlack = 1e-9;

}  // namespace detail

/// Trapezoid integral of ||w||_1^2 over [t0, t0 + r] on the samples
/// (linear interpolation at the window ends).
inline double h1_window_integral(const Trajectory& traj, double t0, double r) {
  if (traj.empty()) throw ValidationError("empty trajectory");
  if (!(r > 0.0)) throw ValidationError("window length r must be positive");
  const double t1 = t0 + r;
  const double slack = detail::kTimeSlack * std::max(1.0, std::abs(t1));
  if (t0 < traj[0].t - slack || t1 > traj.back().t + slack)
    throw ValidationError("window [" + std::to_string(t0) + ", " + std::to_string(t1) +
                          "] outside trajectory");
  double prev_t = t0;
  double prev_y = detail::interpolate_h1(traj, t0);
  double sum = 0.0;
  for (const auto& s : traj.samples) {
    if (s.t <= t0) continue;
    if (s.t >= t1) break;
    sum += 0.5 * (s.t - prev_t) * (prev_y + s.h1_sq);
    prev_t = s.t;
    prev_y = s.h1_sq;
  }
  const double y1 = detail::interpolate_h1(traj, t1);
  sum += 0.5 * (t1 - prev_t) * (prev_y + y1);
  return sum;
}

struct H1WindowCheck {
  double integral = 0.0;
  double bound = 0.0;
  bool satisfied = false;
};

/// int_t^{t+r} ||w||_1^2 against r ||f||^2 / (nu^2 lambda1) + rho0'^2 / nu.
inline H1WindowCheck h1_time_average(const Trajectory& traj, double t, double r,
                                     const AbsorbingParams& p, double rel_tol = 0.0) {
  H1WindowCheck out;
  out.integral = h1_window_integral(traj, t, r);
  out.bound = r * p.f_norm * p.f_norm / (p.nu * p.nu * p.lambda1) +
              p.rho0_prime * p.rho0_prime / p.nu;
  out.satisfied = out.integral <= out.bound * (1.0 + rel_tol);
  return out;
}

inline double gronwall_k1(const AbsorbingParams& p, double r) {
  return r * p.f_norm * p.f_norm / (p.nu * p.nu * p.lambda1) + p.rho0_prime * p.rho0_prime / p.nu;
}

inline double gronwall_k3(const AbsorbingParams& p, double r) {
  return 2.0 * r * p.f_norm * p.f_norm / p.nu;
}

/// H_1 absorbing-set evidence for one trajectory.
///
/// The constant C1(delta, N) behind k2 has no closed form, so the report
/// checks that ||w||_1^2 stays bounded after T0 + r and back-solves the k2
/// that would make the Gronwall bound tight: empirical_k2 =
/// max(0, ln(sup ||w||_1^2 / (k1/r + k3))).
struct H1AbsorbingReport {
  double r = 0.0;
  double k1 = 0.0;
  double k3 = 0.0;
  std::optional<double> k2;  ///< C1 rho0'^8 when C1 is supplied
  double T0 = 0.0;
  double start = 0.0;  ///< T0 + r
  double sup_h1 = 0.0;
  std::vector<double> window_maxima;  ///< max ||w||_1^2 over consecutive r-windows from start
  double eventual_window_max = 0.0;   ///< max over the final r-window of the trajectory
  double empirical_k2 = 0.0;
  double implied_c1 = 0.0;  ///< empirical_k2 / rho0'^8
  bool bounded = false;
  /// Last two window maxima differ by less than 5%.
  bool settled = false;
};

inline H1AbsorbingReport h1_absorbing_report(const Trajectory& traj, const AbsorbingParams& p,
                                             double r, std::optional<double> c1 = std::nullopt) {
  if (!(r > 0.0)) throw ValidationError("window length r must be positive");
  if (traj.empty()) throw ValidationError("empty trajectory");
  H1AbsorbingReport rep;
  rep.r = r;
  rep.k1 = gronwall_k1(p, r);
  rep.k3 = gronwall_k3(p, r);
  if (c1) rep.k2 = *c1 * std::pow(p.rho0_prime, 8);
  rep.T0 = absorbing_time(p);
  rep.start = traj[0].t + rep.T0 + r;
  const double end = traj.back().t;
  if (end < rep.start - detail::kTimeSlack * std::max(1.0, end))
    throw ValidationError("trajectory ends at t = " + std::to_string(end) +
                          " before T0 + r = " + std::to_string(rep.start));

  double sup = 0.0;
  bool finite = true;
  for (const auto& s : traj.samples) {
    if (s.t < rep.start) continue;
    if (!std::isfinite(s.h1_sq)) finite = false;
    sup = std::max(sup, s.h1_sq);
  }
  rep.sup_h1 = sup;
  rep.bounded = finite;

  for (double w0 = rep.start; w0 + r <= end + detail::kTimeSlack * std::max(1.0, end); w0 += r) {
    double m = 0.0;
    for (const auto& s : traj.samples)
      if (s.t >= w0 && s.t <= w0 + r) m = std::max(m, s.h1_sq);
    rep.window_maxima.push_back(m);
  }
  double last = 0.0;
  for (const auto& s : traj.samples)
    if (s.t >= end - r) last = std::max(last, s.h1_sq);
  rep.eventual_window_max = last;
  if (rep.window_maxima.size() >= 2) {
    const double a = rep.window_maxima[rep.window_maxima.size() - 2];
    const double b = rep.window_maxima.back();
    rep.settled = std::abs(a - b) <= 0.05 * std::max(a, b);
  }

  const double base = rep.k1 / r + rep.k3;
  rep.empirical_k2 = (base > 0.0 && sup > base) ? std::log(sup / base) : 0.0;
  rep.implied_c1 = rep.empirical_k2 / std::pow(p.rho0_prime, 8);
  return rep;
}

}  // namespace deconv

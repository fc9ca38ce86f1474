#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "filter.hpp"
#include "operators.hpp"

namespace deconv {

/// Viscosity, filter and forcing of the deconvolution model
///   d_t w + (H_N w . grad) w - nu Lap w + grad q = H_N f.
struct ModelParams {
  double nu = 1.0;
  FilterParams filter;
  /// Steady forcing f (unfiltered). An empty field means f = 0.
  SpectralVectorField forcing;
  /// Optional time-dependent forcing; overrides `forcing` when set.
  std::function<SpectralVectorField(double)> forcing_at;

  void validate() const {
    if (!(nu > 0.0) || !std::isfinite(nu))
      throw ValidationError("viscosity nu must be positive, got " + std::to_string(nu));
    filter.validate();
  }
};

struct SolverState {
  double t = 0.0;
  SpectralVectorField w;
  SpectralVectorField hn_w;  ///< H_N(w)
  SpectralVectorField hn_f;  ///< H_N(f) at time t
};

/// One sample of the energy bookkeeping. Integrals are cumulative from t = 0:
///   dissipation_integral = nu int_0^t ||w||_1^2,  work_integral = int_0^t (H_N f, w).
struct TrajectorySample {
  double t = 0.0;
  double h0_sq = 0.0;
  double h1_sq = 0.0;
  double aw_sq = 0.0;
  double dissipation_integral = 0.0;
  double work_integral = 0.0;
  double energy_residual = 0.0;
  double absorb_bound = 0.0;

  friend bool operator==(const TrajectorySample&, const TrajectorySample&) = default;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;

  bool empty() const noexcept { return samples.empty(); }
  std::size_t size() const noexcept { return samples.size(); }
  const TrajectorySample& operator[](std::size_t i) const { return samples[i]; }
  const TrajectorySample& back() const { return samples.back(); }
};

/// Signed defect of the energy equality at sample i:
///   1/2||w(t_i)||^2 + nu int ||grad w||^2 - 1/2||H_N u0||^2 - int (H_N f, w).
inline double energy_residual(const Trajectory& traj, std::size_t i) {
  if (i >= traj.size())
    throw std::out_of_range("sample index " + std::to_string(i) + " outside trajectory of " +
                            std::to_string(traj.size()) + " samples");
  const auto& s = traj.samples[i];
  const auto& s0 = traj.samples.front();
  return 0.5 * s.h0_sq + s.dissipation_integral - 0.5 * s0.h0_sq - s.work_integral;
}

/// Thrown by simulate(); carries the samples recorded before the failure.
class SimulationBlowUp : public BlowUpError {
 public:
  SimulationBlowUp(const std::string& what, double last_valid_time, Trajectory partial)
      : BlowUpError(what, last_valid_time), partial_(std::move(partial)) {}
  const Trajectory& partial() const noexcept { return partial_; }

 private:
  Trajectory partial_;
};

/// Integrating-factor midpoint integrator (second order). The viscous term is
/// integrated exactly with exp(-nu |k|^2 dt); the projected nonlinearity and
/// forcing use the explicit two-stage midpoint rule.
class ModelSolver {
 public:
  ModelSolver(GridPtr grid, ModelParams params)
      : grid_(std::move(grid)), params_(std::move(params)), ws_(*grid_) {
    params_.validate();
    if (params_.forcing.grid_ptr()) {
      params_.forcing.check_same_grid(SpectralVectorField(grid_));
      if (max_relative_divergence(params_.forcing) > kDivergenceTolerance)
        throw ValidationError("forcing is not divergence-free");
    } else {
      params_.forcing = SpectralVectorField(grid_);
    }
    hn_.resize(grid_->stored_modes());
    for (std::size_t idx = 0; idx < hn_.size(); ++idx)
      hn_[idx] = grid_->active(idx)
                     ? hn_symbol(grid_->k2(idx), params_.filter.delta, params_.filter.order)
                     : 0.0;
    steady_hn_f_ = filtered(params_.forcing);
  }

  static constexpr double kDivergenceTolerance = 1e-10;

  const ModelParams& params() const noexcept { return params_; }
  const GridPtr& grid() const noexcept { return grid_; }

  SpectralVectorField filtered(SpectralVectorField w) const {
    for (std::size_t idx = 0; idx < hn_.size(); ++idx)
      for (int c = 0; c < 3; ++c) w.at(c, idx) *= hn_[idx];
    return w;
  }

  SpectralVectorField filtered_forcing(double t) const {
    if (params_.forcing_at) return filtered(params_.forcing_at(t));
    return steady_hn_f_;
  }

  /// w(0) = H_N(u0). Inputs with relative divergence above 1e-10 are
  /// rejected unless auto_project is set.
  SolverState initial_state(SpectralVectorField u0, bool auto_project = false) const {
    u0.check_same_grid(SpectralVectorField(grid_));
    if (max_relative_divergence(u0) > kDivergenceTolerance) {
      if (!auto_project) throw ValidationError("initial condition is not divergence-free");
      u0 = leray_project(std::move(u0));
    }
    u0.normalize();
    return make_state(0.0, filtered(std::move(u0)));
  }

  SolverState make_state(double t, SpectralVectorField w) const {
    SolverState s;
    s.t = t;
    s.hn_w = filtered(w);
    s.w = std::move(w);
    s.hn_f = filtered_forcing(t);
    return s;
  }

  /// -P_L((H_N w . grad) w) + H_N f
  SpectralVectorField nonlinear_and_forcing(const SpectralVectorField& w,
                                            const SpectralVectorField& hn_w,
                                            const SpectralVectorField& hn_f) {
    SpectralVectorField n = nonlinear_term(hn_w, w, ws_);
    n *= -1.0;
    n += hn_f;
    return n;
  }

  /// Time derivative of w with the pressure eliminated by projection.
  SpectralVectorField rhs(const SolverState& s) {
    SpectralVectorField r = nonlinear_and_forcing(s.w, s.hn_w, s.hn_f);
    r.axpy(-params_.nu, stokes_apply(s.w));
    return r;
  }

  SolverState step(const SolverState& s, double dt) {
    if (!(dt > 0.0)) throw ValidationError("time step must be positive");
    const WaveGrid& g = *grid_;
    const std::size_t n = g.stored_modes();
    const double nu = params_.nu;

    if (dt != factor_dt_) {
      decay_half_.resize(n);
      decay_full_.resize(n);
      for (std::size_t idx = 0; idx < n; ++idx) {
        decay_half_[idx] = std::exp(-0.5 * nu * g.k2(idx) * dt);
        decay_full_[idx] = std::exp(-nu * g.k2(idx) * dt);
      }
      factor_dt_ = dt;
    }

    SpectralVectorField a = nonlinear_and_forcing(s.w, s.hn_w, s.hn_f);
    SpectralVectorField half(grid_);
    for (std::size_t idx = 0; idx < n; ++idx) {
      const double e = decay_half_[idx];
      for (int c = 0; c < 3; ++c) half.at(c, idx) = e * (s.w.at(c, idx) + 0.5 * dt * a.at(c, idx));
    }
    const double t_half = s.t + 0.5 * dt;
    const SpectralVectorField hn_f_half = filtered_forcing(t_half);
    SpectralVectorField b = nonlinear_and_forcing(half, filtered(half), hn_f_half);

    SpectralVectorField next(grid_);
    for (std::size_t idx = 0; idx < n; ++idx) {
      const double eh = decay_half_[idx];
      const double e = decay_full_[idx];
      for (int c = 0; c < 3; ++c)
        next.at(c, idx) = e * s.w.at(c, idx) + dt * eh * b.at(c, idx);
    }
    next.normalize();
    if (!next.all_finite())
      throw BlowUpError("non-finite coefficients after step from t = " + std::to_string(s.t), s.t);
    return make_state(s.t + dt, std::move(next));
  }

  /// dt * max_x |H_N w(x)| * K / (2 pi); advisory stability indicator.
  double cfl_number(const SolverState& s, double dt) {
    const int K = grid_->resolution();
    RealBuffer comp[3] = {RealBuffer(grid_->real_points()), RealBuffer(grid_->real_points()),
                          RealBuffer(grid_->real_points())};
    for (int c = 0; c < 3; ++c) ws_.to_real(s.hn_w.component(c), comp[c]);
    double umax = 0.0;
    for (std::size_t x = 0; x < grid_->real_points(); ++x)
      umax = std::max(umax, std::sqrt(comp[0][x] * comp[0][x] + comp[1][x] * comp[1][x] +
                                      comp[2][x] * comp[2][x]));
    return dt * umax * K / (2.0 * M_PI);
  }

 private:
  GridPtr grid_;
  ModelParams params_;
  ProductWorkspace ws_;
  std::vector<double> hn_;
  SpectralVectorField steady_hn_f_;
  double factor_dt_ = -1.0;
  std::vector<double> decay_half_;
  std::vector<double> decay_full_;
};

/// Time horizon, step and sampling of one run.
struct RunControl {
  double dt = 1e-2;
  double horizon = 1.0;
  int cadence = 1;  ///< steps per sample
  /// rho0^2 used for the absorb_bound column (steady-state bound of ||w||^2).
  std::optional<double> rho0_sq;
  double lambda1 = 1.0;
  /// Called after every step with the new state and step number.
  std::function<void(const SolverState&, long)> on_step;
};

/// Energy-ball bound ||w0||^2 e^{-nu lambda1 t} + rho0^2 (1 - e^{-nu lambda1 t}).
inline double absorbing_bound_value(double t, double w0_norm2, double nu, double lambda1,
                                    double rho0_sq) {
  const double decay = std::exp(-nu * lambda1 * t);
  return w0_norm2 * decay + rho0_sq * (-std::expm1(-nu * lambda1 * t));
}

struct SimulationOutput {
  Trajectory trajectory;
  SolverState final_state;
};

/// Advances `start` to t = start.t + horizon, sampling every `cadence` steps
/// (and always the last step). Integrals use the trapezoid rule per step.
inline SimulationOutput simulate(ModelSolver& solver, SolverState start, const RunControl& rc) {
  if (!(rc.dt > 0.0)) throw ValidationError("time step must be positive");
  if (!(rc.horizon >= 0.0)) throw ValidationError("horizon must be nonnegative");
  if (rc.cadence < 1) throw ValidationError("cadence must be >= 1");
  const double nu = solver.params().nu;
  const double t0 = start.t;
  const long nsteps = rc.horizon == 0.0 ? 0 : std::max(1L, long(std::ceil(rc.horizon / rc.dt - 1e-9)));

  auto observe = [&](const SolverState& s, double& h1_sq, double& work) {
    TrajectorySample smp;
    smp.t = s.t;
    smp.h0_sq = sobolev_norm_sq(s.w, 0.0);
    smp.h1_sq = sobolev_norm_sq(s.w, 1.0);
    smp.aw_sq = sobolev_norm_sq(s.w, 2.0);
    h1_sq = smp.h1_sq;
    work = inner_product(s.hn_f, s.w);
    return smp;
  };

  SimulationOutput out;
  Trajectory& traj = out.trajectory;
  const double w0_sq = sobolev_norm_sq(start.w, 0.0);
  auto finish_sample = [&](TrajectorySample& smp) {
    if (rc.rho0_sq)
      smp.absorb_bound = absorbing_bound_value(smp.t - t0, w0_sq, nu, rc.lambda1, *rc.rho0_sq);
    traj.samples.push_back(smp);
    smp.energy_residual = energy_residual(traj, traj.size() - 1);
    traj.samples.back().energy_residual = smp.energy_residual;
  };

  double h1_prev = 0.0, work_prev = 0.0;
  TrajectorySample cur = observe(start, h1_prev, work_prev);
  finish_sample(cur);

  SolverState state = std::move(start);
  double dissipation = 0.0, work_int = 0.0;
  // Every step uses dt exactly and times come from a global step index when
  // t0 sits on the dt lattice, so runs resumed mid-way reproduce the
  // uninterrupted one bit for bit. Only a genuinely short final step differs.
  const double n0 = std::round(t0 / rc.dt);
  const bool on_lattice = std::abs(t0 / rc.dt - n0) <= 1e-9 * std::max(1.0, std::abs(n0));
  const bool short_last = std::abs(double(nsteps) * rc.dt - rc.horizon) > 1e-9 * rc.dt;
  for (long k = 1; k <= nsteps; ++k) {
    double target = on_lattice ? (n0 + double(k)) * rc.dt : t0 + double(k) * rc.dt;
    double h = rc.dt;
    if (k == nsteps && short_last) {
      target = t0 + rc.horizon;
      h = target - state.t;
    }
    try {
      state = solver.step(state, h);
    } catch (const BlowUpError& e) {
      throw SimulationBlowUp(e.what(), e.last_valid_time(), traj);
    }
    state.t = target;
    double h1 = 0.0, work = 0.0;
    TrajectorySample smp = observe(state, h1, work);
    dissipation += nu * 0.5 * h * (h1_prev + h1);
    work_int += 0.5 * h * (work_prev + work);
    h1_prev = h1;
    work_prev = work;
    if (rc.on_step) rc.on_step(state, k);
    if (k % rc.cadence == 0 || k == nsteps) {
      smp.dissipation_integral = dissipation;
      smp.work_integral = work_int;
      finish_sample(smp);
    }
  }
  out.final_state = std::move(state);
  return out;
}

}  // namespace deconv

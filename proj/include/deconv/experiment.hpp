#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "config.hpp"
#include "diagnostics.hpp"
#include "initial_data.hpp"
#include "parallel.hpp"
#include "solver.hpp"

namespace deconv {

/// Grid, model and initial data assembled from a SolverConfig.
struct Experiment {
  GridPtr grid;
  ModelParams params;
  SpectralVectorField u0;
  double lambda1 = 1.0;
  double f_norm = 0.0;  ///< H_0 norm of the unfiltered forcing

  double rho0() const { return deconv::rho0(params.nu, lambda1, f_norm); }
};

inline Experiment make_experiment(const SolverConfig& cfg) {
  Experiment e;
  e.grid = make_grid(cfg.K, cfg.dealias);
  e.params.nu = cfg.nu;
  e.params.filter = cfg.filter();
  e.params.forcing = generate_ic(cfg.forcing, e.grid, e.params.filter);
  e.u0 = generate_ic(cfg.ic, e.grid, e.params.filter);
  e.lambda1 = smallest_eigenvalue(*e.grid);
  e.f_norm = sobolev_norm(e.params.forcing, 0.0);
  return e;
}

inline RunControl run_control(const SolverConfig& cfg, const Experiment& e) {
  RunControl rc;
  rc.dt = cfg.dt;
  rc.horizon = cfg.T;
  rc.cadence = cfg.cadence;
  rc.lambda1 = e.lambda1;
  const double r0 = e.rho0();
  rc.rho0_sq = r0 * r0;
  return rc;
}

/// Runs the configured trajectory from t = 0, or from `resume` when given
/// (to t = resume.t + T).
inline SimulationOutput simulate(const SolverConfig& cfg,
                                 const std::optional<Snapshot>& resume = std::nullopt,
                                 std::function<void(const SolverState&, long)> on_step = {}) {
  Experiment e = make_experiment(cfg);
  ModelSolver solver(e.grid, e.params);
  SolverState start;
  if (resume) {
    check_snapshot_grid(*resume, *e.grid);
    SpectralVectorField w(e.grid);
    for (int c = 0; c < 3; ++c)
      for (std::size_t idx = 0; idx < w.modes(); ++idx) w.at(c, idx) = resume->field.at(c, idx);
    start = solver.make_state(resume->t, std::move(w));
  } else {
    start = solver.initial_state(e.u0, cfg.auto_project);
  }
  RunControl rc = run_control(cfg, e);
  rc.on_step = std::move(on_step);
  return simulate(solver, std::move(start), rc);
}

struct EnergyCheckLevel {
  double dt = 0.0;
  double residual = 0.0;  ///< energy_residual at the final sample
};

struct EnergyCheckReport {
  std::vector<EnergyCheckLevel> levels;
  std::vector<double> orders;  ///< log2 of successive residual ratios
};

/// Energy-equality defect at t = T for dt, dt/2, ..., dt/2^(levels-1).
inline EnergyCheckReport energy_check(const SolverConfig& cfg, int levels = 3) {
  if (levels < 2) throw ValidationError("energy check needs at least two levels");
  EnergyCheckReport rep;
  rep.levels.resize(std::size_t(levels));
  parallel_for(rep.levels.size(), [&](std::size_t i) {
    SolverConfig c = cfg;
    c.dt = cfg.dt / double(1L << i);
    c.cadence = 1 << 30;
    const auto out = simulate(c);
    rep.levels[i] = {c.dt, energy_residual(out.trajectory, out.trajectory.size() - 1)};
  });
  for (std::size_t i = 0; i + 1 < rep.levels.size(); ++i)
    rep.orders.push_back(
        std::log2(std::abs(rep.levels[i].residual) / std::abs(rep.levels[i + 1].residual)));
  return rep;
}

struct ProbeMember {
  std::size_t index = 0;
  double u0_norm = 0.0;              ///< ||u0||
  double initial_norm = 0.0;         ///< ||H_N u0||
  std::optional<double> entry_time;  ///< first sample inside B(0, rho0')
  bool stays_inside = false;         ///< no sample outside after entry
  double max_bound_ratio = 0.0;      ///< max ||w||^2 / absorbing_bound(t)
  Trajectory trajectory;
};

struct ProbeReport {
  AbsorbingParams params;
  double T0 = 0.0;
  double horizon = 0.0;
  double epsilon = 0.05;
  std::vector<ProbeMember> members;
  bool pass = false;
};

/// Initial-norm scale of member m: linear from 1 (member 0) to 1/10 (last).
inline double probe_member_scale(std::size_t m, std::size_t n) {
  if (n <= 1) return 1.0;
  return 1.0 - 0.9 * double(m) / double(n - 1);
}

/// Runs `ensemble_size` random initial data with ||u0|| spread over [R/10, R]
/// (so ||H_N u0|| <= R) to t = 2 T0 and records when each enters B(0, rho0')
/// and whether it leaves.
inline ProbeReport ensemble_absorb_probe(double R, double rho0_prime, std::size_t ensemble_size,
                                         const SolverConfig& tmpl) {
  if (ensemble_size == 0) throw ValidationError("ensemble size must be positive");
  if (!(R > 0.0)) throw ValidationError("initial radius R must be positive");
  const Experiment base = make_experiment(tmpl);
  ProbeReport rep;
  rep.params = {tmpl.nu, base.lambda1, base.f_norm, rho0_prime, R};
  rep.T0 = absorbing_time(rep.params);
  rep.horizon = rep.T0 > 0.0 ? 2.0 * rep.T0 : tmpl.T;
  rep.epsilon = tmpl.epsilon;
  rep.members.resize(ensemble_size);
  const double r0 = rep.params.rho0();
  const double inside_sq = rho0_prime * rho0_prime;

  parallel_for(ensemble_size, [&](std::size_t m) {
    FieldSpec ic = tmpl.ic;
    if (ic.kind != FieldSpec::Kind::random_spectrum) ic = FieldSpec{};
    ic.kind = FieldSpec::Kind::random_spectrum;
    ic.seed = tmpl.ic.seed + m;
    ic.norm = R * probe_member_scale(m, ensemble_size);
    ic.filtered_norm = false;

    ModelSolver solver(base.grid, base.params);
    const auto u0 = generate_ic(ic, base.grid, base.params.filter);
    SolverState start = solver.initial_state(u0);
    RunControl rc;
    rc.dt = tmpl.dt;
    rc.horizon = rep.horizon;
    rc.cadence = tmpl.cadence;
    rc.lambda1 = base.lambda1;
    rc.rho0_sq = r0 * r0;
    auto out = simulate(solver, std::move(start), rc);

    ProbeMember& pm = rep.members[m];
    pm.index = m;
    pm.u0_norm = sobolev_norm(u0, 0.0);
    pm.trajectory = std::move(out.trajectory);
    const auto& s = pm.trajectory.samples;
    pm.initial_norm = std::sqrt(s.front().h0_sq);
    pm.stays_inside = true;
    for (const auto& smp : s) {
      const double bound = absorbing_bound(smp.t, s.front().h0_sq, rep.params);
      if (bound > 0.0) pm.max_bound_ratio = std::max(pm.max_bound_ratio, smp.h0_sq / bound);
      const bool inside = smp.h0_sq < inside_sq;
      if (!pm.entry_time && inside) pm.entry_time = smp.t;
      if (pm.entry_time && !inside) pm.stays_inside = false;
    }
    if (!pm.entry_time) pm.stays_inside = false;
  });

  rep.pass = true;
  for (const auto& pm : rep.members)
    if (!pm.entry_time || *pm.entry_time > rep.T0 * (1.0 + rep.epsilon) || !pm.stays_inside)
      rep.pass = false;
  return rep;
}

}  // namespace deconv

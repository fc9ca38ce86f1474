#include <gtest/gtest.h>

#include <deconv/experiment.hpp>
#include <deconv/initial_data.hpp>
#include <deconv/solver.hpp>

using namespace deconv;

namespace {

SpectralVectorField unit_random(const GridPtr& g, std::uint64_t seed, double norm = 1.0) {
  auto w = random_field(g, seed);
  return (norm / sobolev_norm(w, 0.0)) * w;
}

SpectralVectorField shear(const GridPtr& g, double amp = 1.0) {
  SpectralVectorField w(g);
  w.set_wavevector({1, 0, 0}, {Complex{}, Complex{amp}, Complex{}});
  return w;
}

SpectralVectorField two_mode(const GridPtr& g) {
  SpectralVectorField w(g);
  w.set_wavevector({1, 0, 0}, {Complex{}, Complex{1.0}, Complex{}});
  w.set_wavevector({0, 0, 1}, {Complex{0.0, 0.8}, Complex{0.5}, Complex{}});
  return w;
}

ModelParams params(double nu, double delta, int N, SpectralVectorField f = {}) {
  ModelParams p;
  p.nu = nu;
  p.filter = FilterParams{delta, N};
  p.forcing = std::move(f);
  return p;
}

SolverState run(ModelSolver& s, SolverState st, double dt, int n) {
  for (int i = 0; i < n; ++i) st = s.step(st, dt);
  return st;
}

}  // namespace

TEST(InitialState, ZeroAndFilteredShear) {
  const auto g = make_grid(16);
  ModelSolver s(g, params(1.0, 1.0, 0));
  EXPECT_EQ(sobolev_norm(s.initial_state(SpectralVectorField(g)).w, 0.0), 0.0);
  const auto st = s.initial_state(shear(g));
  EXPECT_EQ(st.w, 0.5 * shear(g));
  EXPECT_EQ(st.t, 0.0);
}

TEST(InitialState, NeverIncreasesNorm) {
  const auto g = make_grid(16);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto u0 = random_field(g, seed);
    for (int N : {0, 2, 10}) {
      ModelSolver s(g, params(0.5, 0.3, N));
      EXPECT_LE(sobolev_norm(s.initial_state(u0).w, 0.0), sobolev_norm(u0, 0.0));
    }
  }
}

TEST(InitialState, RejectsDivergentDataUnlessAutoProjecting) {
  const auto g = make_grid(8);
  SpectralVectorField u0(g);
  u0.set_wavevector({1, 0, 0}, {Complex{1.0}, Complex{1.0}, Complex{}});
  ModelSolver s(g, params(1.0, 1.0, 0));
  EXPECT_THROW(s.initial_state(u0), ValidationError);
  const auto st = s.initial_state(u0, true);
  EXPECT_EQ(max_relative_divergence(st.w), 0.0);
  EXPECT_EQ(st.w, 0.5 * shear(g));
}

TEST(InitialState, RejectsDivergentForcing) {
  const auto g = make_grid(8);
  SpectralVectorField f(g);
  f.set_wavevector({1, 0, 0}, {Complex{1.0}, Complex{}, Complex{}});
  EXPECT_THROW(ModelSolver(g, params(1.0, 1.0, 0, f)), ValidationError);
}

TEST(Rhs, ZeroAndShearMode) {
  const auto g = make_grid(16);
  ModelSolver s(g, params(0.7, 0.5, 2));
  EXPECT_EQ(sobolev_norm(s.rhs(s.initial_state(SpectralVectorField(g))), 0.0), 0.0);
  const auto st = s.initial_state(shear(g));
  const auto r = s.rhs(st);
  EXPECT_LE(sobolev_norm(r + 0.7 * st.w, 0.0), 1e-16);
}

TEST(Rhs, EnergyIdentity) {
  const auto g = make_grid(16);
  const auto f = random_field(g, 77);
  ModelSolver s(g, params(0.3, 0.4, 3, f));
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto st = s.initial_state(random_field(g, seed));
    const double lhs = inner_product(s.rhs(st), st.w);
    const double rhs = -0.3 * sobolev_norm_sq(st.w, 1.0) + inner_product(st.hn_f, st.w);
    const double scale = sobolev_norm(st.hn_w, 0.0) * sobolev_norm(st.w, 1.0) * sobolev_norm(st.w, 0.0) +
                         std::abs(rhs);
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * scale);
  }
}

TEST(Step, ZeroStaysZero) {
  const auto g = make_grid(8);
  ModelSolver s(g, params(1.0, 1.0, 1));
  const auto st = run(s, s.initial_state(SpectralVectorField(g)), 0.1, 10);
  EXPECT_EQ(sobolev_norm(st.w, 0.0), 0.0);
}

TEST(Step, ShearModeDecaysExactly) {
  const auto g = make_grid(16);
  ModelSolver s(g, params(0.8, 1.0, 2));
  auto st = s.initial_state(shear(g, 1.3));
  const auto w0 = st.w;
  const double dt = 0.05;
  for (int n = 1; n <= 40; ++n) {
    st = s.step(st, dt);
    const auto expected = std::exp(-0.8 * n * dt) * w0;
    EXPECT_LE(sobolev_norm(st.w - expected, 0.0), 1e-13 * sobolev_norm(expected, 0.0));
  }
}

TEST(Step, SecondOrderSelfConvergence) {
  const auto g = make_grid(16);
  ModelSolver s(g, params(0.1, 0.5, 1, 0.5 * two_mode(g)));
  const auto st0 = s.initial_state(4.0 * two_mode(g));
  const double T = 1.0;
  const double dt0 = 0.05;
  const auto ref = run(s, st0, dt0 / 64, 20 * 64).w;
  std::vector<double> err;
  for (int level = 0; level < 3; ++level) {
    const int n = 20 << level;
    err.push_back(sobolev_norm(run(s, st0, T / n, n).w - ref, 0.0));
  }
  for (int i = 0; i < 2; ++i) {
    const double order = std::log2(err[i] / err[i + 1]);
    EXPECT_NEAR(order, 2.0, 0.3) << "errors " << err[i] << " " << err[i + 1];
  }
}

TEST(Step, PreservesFieldInvariants) {
  const auto g = make_grid(16);
  ModelSolver s(g, params(0.05, 0.3, 2, unit_random(g, 5)));
  auto st = s.initial_state(unit_random(g, 6));
  for (int n = 0; n < 20; ++n) {
    st = s.step(st, 0.01);
    EXPECT_LE(max_relative_divergence(st.w), 1e-13);
    for (int c = 0; c < 3; ++c) EXPECT_EQ(st.w.at(c, 0), Complex{});
    for (std::size_t idx = 0; idx < st.w.modes(); ++idx) {
      const auto p = g->partner(idx);
      if (p >= 0)
        for (int c = 0; c < 3; ++c) EXPECT_EQ(st.w.at(c, std::size_t(p)), std::conj(st.w.at(c, idx)));
      if (!g->mask(idx))
        for (int c = 0; c < 3; ++c) EXPECT_EQ(st.w.at(c, idx), Complex{});
    }
  }
}

TEST(Step, UnforcedEnergyNonincreasing) {
  const auto g = make_grid(16);
  ModelSolver s(g, params(0.02, 0.2, 3));
  auto st = s.initial_state(unit_random(g, 8, 3.0));
  double prev = sobolev_norm_sq(st.w, 0.0);
  for (int n = 0; n < 50; ++n) {
    st = s.step(st, 0.005);
    const double e = sobolev_norm_sq(st.w, 0.0);
    EXPECT_LE(e, prev + 1e-8 * prev);
    prev = e;
  }
}

TEST(Step, NonFiniteCoefficientsRaiseBlowUp) {
  const auto g = make_grid(8);
  ModelSolver s(g, params(1e-3, 0.1, 0));
  auto st = s.initial_state(1e3 * random_field(g, 2));
  try {
    for (int n = 0; n < 200; ++n) st = s.step(st, 5.0);
    FAIL() << "expected blow-up";
  } catch (const BlowUpError& e) {
    EXPECT_EQ(e.last_valid_time(), st.t);
  }
}

TEST(Step, OrderZeroUsesHelmholtzSymbol) {
  const auto g = make_grid(16);
  ModelSolver s(g, params(1.0, 0.7, 0));
  const auto w = random_field(g, 12);
  EXPECT_LE(sobolev_norm(s.filtered(w) - helmholtz_filter(w, 0.7), 0.0), 1e-15 * sobolev_norm(w, 0.0));
}

TEST(Step, TimeDependentForcingHook) {
  const auto g = make_grid(8);
  auto p = params(1.0, 1.0, 0);
  const auto base = shear(g);
  p.forcing_at = [base](double t) { return std::cos(t) * base; };
  ModelSolver s(g, p);
  auto st = s.initial_state(SpectralVectorField(g));
  EXPECT_EQ(st.hn_f, 0.5 * base);
  st = s.step(st, 0.1);
  EXPECT_GT(sobolev_norm(st.w, 0.0), 0.0);
  EXPECT_EQ(st.hn_f, 0.5 * (std::cos(0.1) * base));
}

TEST(Simulate, ZeroTrajectory) {
  const auto g = make_grid(8);
  ModelSolver s(g, params(1.0, 1.0, 1));
  RunControl rc;
  rc.dt = 0.1;
  rc.horizon = 1.0;
  rc.cadence = 2;
  const auto out = simulate(s, s.initial_state(SpectralVectorField(g)), rc);
  ASSERT_EQ(out.trajectory.size(), 6u);
  for (const auto& smp : out.trajectory.samples) {
    EXPECT_EQ(smp.h0_sq, 0.0);
    EXPECT_EQ(smp.dissipation_integral, 0.0);
    EXPECT_EQ(smp.energy_residual, 0.0);
  }
  EXPECT_DOUBLE_EQ(out.trajectory.back().t, 1.0);
  for (std::size_t i = 1; i < out.trajectory.size(); ++i)
    EXPECT_GT(out.trajectory[i].t, out.trajectory[i - 1].t);
}

TEST(Simulate, LastStepLandsOnHorizon) {
  const auto g = make_grid(8);
  ModelSolver s(g, params(1.0, 1.0, 1));
  RunControl rc;
  rc.dt = 0.3;
  rc.horizon = 1.0;
  const auto out = simulate(s, s.initial_state(shear(g)), rc);
  EXPECT_EQ(out.trajectory.size(), 5u);
  EXPECT_EQ(out.trajectory.back().t, 1.0);
  EXPECT_EQ(out.final_state.t, 1.0);
}

TEST(Simulate, BlowUpCarriesPartialTrajectory) {
  const auto g = make_grid(8);
  ModelSolver s(g, params(1e-3, 0.1, 0));
  RunControl rc;
  rc.dt = 5.0;
  rc.horizon = 5000.0;
  try {
    simulate(s, s.initial_state(1e3 * random_field(g, 2)), rc);
    FAIL() << "expected blow-up";
  } catch (const SimulationBlowUp& e) {
    EXPECT_FALSE(e.partial().empty());
    EXPECT_EQ(e.partial().back().t, e.last_valid_time());
  }
}

TEST(EnergyResidual, IndexChecksAndZeroRun) {
  Trajectory t;
  EXPECT_THROW(energy_residual(t, 0), std::out_of_range);
  t.samples.push_back({});
  t.samples.push_back({});
  EXPECT_EQ(energy_residual(t, 1), 0.0);
  EXPECT_THROW(energy_residual(t, 2), std::out_of_range);
}

TEST(EnergyResidual, ShearModeConvergesAtSecondOrder) {
  const auto g = make_grid(16);
  ModelSolver s(g, params(1.0, 1.0, 0));
  std::vector<double> res;
  for (double dt : {0.1, 0.05, 0.025}) {
    RunControl rc;
    rc.dt = dt;
    rc.horizon = 1.0;
    const auto out = simulate(s, s.initial_state(shear(g)), rc);
    res.push_back(std::abs(energy_residual(out.trajectory, out.trajectory.size() - 1)));
  }
  EXPECT_NEAR(std::log2(res[0] / res[1]), 2.0, 0.1);
  EXPECT_NEAR(std::log2(res[1] / res[2]), 2.0, 0.1);
}

TEST(Simulate, DeterministicReruns) {
  SolverConfig cfg;
  cfg.K = 16;
  cfg.nu = 0.05;
  cfg.delta = 0.3;
  cfg.N = 2;
  cfg.dt = 0.01;
  cfg.T = 0.1;
  cfg.ic.kind = FieldSpec::Kind::random_spectrum;
  cfg.ic.seed = 4;
  cfg.ic.norm = 2.0;
  cfg.forcing.kind = FieldSpec::Kind::random_spectrum;
  cfg.forcing.cutoff = 2.0;
  const auto a = simulate(cfg);
  const auto b = simulate(cfg);
  EXPECT_EQ(a.trajectory.samples, b.trajectory.samples);
  EXPECT_EQ(a.final_state.w, b.final_state.w);
}

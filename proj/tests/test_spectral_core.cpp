#include <gtest/gtest.h>

#include <deconv/initial_data.hpp>
#include <deconv/operators.hpp>

#include "oracles.hpp"

using namespace deconv;

namespace {

SpectralVectorField shear_mode(const GridPtr& g, std::array<int, 3> k = {1, 0, 0}) {
  SpectralVectorField w(g);
  w.set_wavevector(k, {Complex{0.0}, Complex{1.0}, Complex{0.0}});
  return w;
}

}  // namespace

TEST(SobolevNorm, ZeroField) {
  const auto g = make_grid(8);
  EXPECT_EQ(sobolev_norm(SpectralVectorField(g), 0.0), 0.0);
  EXPECT_EQ(sobolev_norm(SpectralVectorField(g), -1.0), 0.0);
}

TEST(SobolevNorm, ShearModeAtUnitWavenumber) {
  const auto w = shear_mode(make_grid(8));
  EXPECT_DOUBLE_EQ(sobolev_norm_sq(w, 0.0), 2.0);
  EXPECT_DOUBLE_EQ(sobolev_norm_sq(w, 1.0), 2.0);
}

TEST(SobolevNorm, DiagonalModeHandSum) {
  // Modes +-(1,1,0), |k|^2 = 2, |w_hat|^2 = 1 each: 2 * 2 = 4.
  const auto g = make_grid(8);
  SpectralVectorField w(g);
  w.set_wavevector({1, 1, 0}, {Complex{1.0 / std::sqrt(2.0)}, Complex{-1.0 / std::sqrt(2.0)}, Complex{}});
  EXPECT_NEAR(sobolev_norm_sq(w, 1.0), 4.0, 1e-14);
  EXPECT_NEAR(sobolev_norm_sq(w, 0.0), 2.0, 1e-14);
}

TEST(SobolevNorm, NegativeIndexAndHalfSpectrumWeights) {
  const auto g = make_grid(8);
  SpectralVectorField w(g);
  w.set_wavevector({1, 0, 2}, {Complex{0.0, 1.0}, Complex{2.0}, Complex{0.0}});
  // Mode (1,0,2) and its unstored conjugate: |k|^2 = 5, |w_hat|^2 = 5.
  EXPECT_NEAR(sobolev_norm_sq(w, -1.0), 2.0 * 5.0 / 5.0, 1e-14);
  EXPECT_NEAR(sobolev_norm_sq(w, 0.0), 10.0, 1e-14);
}

TEST(SobolevNorm, H0MatchesRealSpaceEnergy) {
  const auto g = make_grid(8);
  const auto w = random_field(g, 11);
  EXPECT_NEAR(sobolev_norm_sq(w, 0.0), oracle::energy_quadrature(w, 8), 1e-10 * sobolev_norm_sq(w, 0.0));
}

TEST(LerayProject, DivergenceFreeInputUnchanged) {
  const auto g = make_grid(8);
  const auto w = random_field(g, 3);
  const auto p = leray_project(w);
  EXPECT_LE(sobolev_norm(p - w, 0.0), 1e-15 * sobolev_norm(w, 0.0));
}

TEST(LerayProject, GradientFieldAnnihilated) {
  const auto g = make_grid(8);
  SpectralVectorField w(g);
  w.set_wavevector({1, 2, 0}, {Complex{1.0}, Complex{2.0}, Complex{0.0}});
  EXPECT_EQ(sobolev_norm(leray_project(w), 0.0), 0.0);
}

TEST(LerayProject, SingleModeFormula) {
  const auto g = make_grid(8);
  SpectralVectorField w(g);
  w.set_wavevector({1, 0, 0}, {Complex{1.0}, Complex{1.0}, Complex{0.0}});
  const auto p = leray_project(w);
  const auto idx = std::size_t(g->find({1, 0, 0}));
  EXPECT_EQ(p.at(0, idx), Complex{0.0});
  EXPECT_EQ(p.at(1, idx), Complex{1.0});
  EXPECT_EQ(p.at(2, idx), Complex{0.0});
}

TEST(LerayProject, IdempotentSelfAdjointAndDivergenceFree) {
  const auto g = make_grid(16);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = random_field(g, seed, false);
    const auto b = random_field(g, seed + 100, false);
    const auto pa = leray_project(a);
    EXPECT_LE(max_relative_divergence(pa), 1e-14);
    EXPECT_LE(sobolev_norm(leray_project(pa) - pa, 0.0), 1e-14 * sobolev_norm(pa, 0.0));
    const double lhs = inner_product(pa, b), rhs = inner_product(a, leray_project(b));
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * sobolev_norm(a, 0.0) * sobolev_norm(b, 0.0));
  }
}

TEST(StokesApply, ScalesByWavenumberSquared) {
  const auto g = make_grid(8);
  const auto w = shear_mode(g);
  EXPECT_EQ(stokes_apply(w), w);
  SpectralVectorField d(g);
  d.set_wavevector({1, 1, 1}, {Complex{1.0}, Complex{-1.0}, Complex{0.0}});
  const auto Ad = stokes_apply(d);
  const auto idx = std::size_t(g->find({1, 1, 1}));
  EXPECT_EQ(Ad.at(0, idx), Complex{3.0});
  EXPECT_EQ(Ad.at(1, idx), Complex{-3.0});
}

TEST(StokesApply, NormIdentities) {
  const auto g = make_grid(16);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto w = random_field(g, seed);
    const auto Aw = stokes_apply(w);
    EXPECT_NEAR(sobolev_norm(Aw, 0.0), sobolev_norm(w, 2.0), 1e-12 * sobolev_norm(w, 2.0));
    EXPECT_NEAR(inner_product(Aw, w), sobolev_norm_sq(w, 1.0), 1e-12 * sobolev_norm_sq(w, 1.0));
  }
}

TEST(SmallestEigenvalue, UnitOnStandardGrids) {
  for (int K : {4, 8, 16, 32}) EXPECT_EQ(smallest_eigenvalue(*make_grid(K)), 1.0);
  EXPECT_EQ(smallest_eigenvalue(*make_grid(8, DealiasRule::none)), 1.0);
}

TEST(SmallestEigenvalue, EmptySpectrumRejected) {
  EXPECT_THROW(smallest_eigenvalue(*make_grid(8, DealiasRule::two_thirds, 0)), ValidationError);
}

TEST(SmallestEigenvalue, PoincareOnRandomFields) {
  const auto g = make_grid(16);
  const double l1 = smallest_eigenvalue(*g);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto w = random_field(g, seed);
    EXPECT_LE(l1 * sobolev_norm_sq(w, 0.0), sobolev_norm_sq(w, 1.0));
  }
}

TEST(Trilinear, MatchesQuadratureOracleOn4Cubed) {
  const auto g = make_grid(4);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto u = random_field(g, seed, false);
    const auto v = random_field(g, seed + 10, false);
    const auto w = random_field(g, seed + 20, false);
    const double fast = trilinear_b(u, v, w);
    const double ref = oracle::trilinear_quadrature(u, v, w, 8);
    EXPECT_NEAR(fast, ref, 1e-10 * std::max(1.0, std::abs(ref)));
  }
}

TEST(Trilinear, MatchesQuadratureOracleForSparseFieldsOn16Cubed) {
  const auto g = make_grid(16);
  SpectralVectorField u(g), v(g), w(g);
  u.set_wavevector({1, 2, 0}, {Complex{2.0}, Complex{-1.0}, Complex{0.0, 0.5}});
  u.set_wavevector({0, 1, 3}, {Complex{0.3}, Complex{0.0, 0.6}, Complex{-0.2}});
  v.set_wavevector({2, -1, 1}, {Complex{1.0, 1.0}, Complex{0.5}, Complex{-0.5}});
  v.set_wavevector({1, 1, 0}, {Complex{0.0}, Complex{0.0}, Complex{1.0}});
  w.set_wavevector({3, 1, 1}, {Complex{0.7}, Complex{0.0, -1.0}, Complex{1.0}});
  w.set_wavevector({2, 0, 1}, {Complex{0.1}, Complex{0.4}, Complex{0.0, 0.2}});
  const double ref = oracle::trilinear_quadrature(u, v, w, 12);
  EXPECT_NEAR(trilinear_b(u, v, w), ref, 1e-10 * std::max(1.0, std::abs(ref)));
  EXPECT_GT(std::abs(ref), 1e-3);
}

TEST(Trilinear, VanishesForConstantSecondArgument) {
  const auto g = make_grid(8);
  const auto u = random_field(g, 1);
  const auto w = random_field(g, 2);
  EXPECT_EQ(trilinear_b(u, SpectralVectorField(g), w), 0.0);
}

TEST(Trilinear, CancellationAndAntisymmetry) {
  const auto g = make_grid(16);
  ProductWorkspace ws(*g);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto u = random_field(g, seed);
    const auto v = random_field(g, seed + 50);
    const auto w = random_field(g, seed + 100);
    const double scale_uww = sobolev_norm(u, 0.0) * sobolev_norm(w, 1.0) * sobolev_norm(w, 0.0);
    EXPECT_LE(std::abs(trilinear_b(u, w, w, ws)), 1e-12 * scale_uww);
    const double scale = sobolev_norm(u, 0.0) * sobolev_norm(v, 1.0) * sobolev_norm(w, 1.0);
    EXPECT_LE(std::abs(trilinear_b(u, v, w, ws) + trilinear_b(u, w, v, ws)), 1e-12 * scale);
  }
}

TEST(NonlinearTerm, ShearModeSelfAdvectionIsZero) {
  const auto g = make_grid(16);
  const auto w = shear_mode(g);
  EXPECT_EQ(sobolev_norm(nonlinear_term(w, w), 0.0), 0.0);
}

TEST(NonlinearTerm, ZeroAdvectingField) {
  const auto g = make_grid(8);
  const auto w = random_field(g, 4);
  EXPECT_EQ(sobolev_norm(nonlinear_term(SpectralVectorField(g), w), 0.0), 0.0);
}

TEST(NonlinearTerm, ProjectedZeroMeanAndEnergyNeutral) {
  const auto g = make_grid(16);
  const auto u = random_field(g, 5);
  const auto w = random_field(g, 6);
  const auto n = nonlinear_term(u, w);
  EXPECT_LE(max_relative_divergence(n), 1e-13);
  for (int c = 0; c < 3; ++c) EXPECT_EQ(n.at(c, 0), Complex{});
  const double scale = sobolev_norm(u, 0.0) * sobolev_norm(w, 1.0) * sobolev_norm(w, 0.0);
  EXPECT_LE(std::abs(inner_product(n, w)), 1e-12 * scale);
}

TEST(NonlinearTerm, SingleTriadAgainstHandComputation) {
  // u = 2 cos(x2) e1, w = 2 cos(x1) e2:
  // (u.grad) w = u1 d1 w = -4 sin(x1) cos(x2) e2 = sum_{s1,s2 = +-1} i s1 e^{i(s1 x1 + s2 x2)} e2.
  const auto g = make_grid(16);
  SpectralVectorField u(g), w(g);
  u.set_wavevector({0, 1, 0}, {Complex{1.0}, Complex{}, Complex{}});
  w.set_wavevector({1, 0, 0}, {Complex{}, Complex{1.0}, Complex{}});
  const auto n = nonlinear_term(u, w);
  SpectralVectorField expected(g);
  for (int s1 : {-1, 1})
    for (int s2 : {-1, 1}) {
      bool conj = false;
      const auto idx = g->find({s1, s2, 0}, &conj);
      expected.at(1, std::size_t(idx)) = Complex{0.0, double(s1)};
    }
  expected = leray_project(expected);
  EXPECT_LE(sobolev_norm(n - expected, 0.0), 1e-14);
}

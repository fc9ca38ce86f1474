#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "filter.hpp"
#include "initial_data.hpp"
#include "operators.hpp"

namespace deconv {

struct CheckResult {
  std::string name;
  bool pass = false;
  double worst = 0.0;      ///< worst observed value of the checked quantity
  double tolerance = 0.0;
};

namespace detail {

inline double rel_diff(const SpectralVectorField& a, const SpectralVectorField& b) {
  const double scale = std::max(sobolev_norm(a, 0.0), sobolev_norm(b, 0.0));
  return scale == 0.0 ? 0.0 : sobolev_norm(a - b, 0.0) / scale;
}

class Tracker {
 public:
  Tracker(std::string name, double tol) : r_{std::move(name), true, 0.0, tol} {}
  void observe(double v) {
    if (!(v <= r_.tolerance)) r_.pass = false;
    r_.worst = std::max(r_.worst, v);
  }
  CheckResult result() const { return r_; }

 private:
  CheckResult r_;
};

}  // namespace detail

/// Operator property suite behind `verify-operators`. Each check reports the
/// worst violation over `fields` random fields on a K^3 grid.
inline std::vector<CheckResult> verify_operators(int K = 16, int fields = 20, std::uint64_t seed = 1) {
  const GridPtr grid = make_grid(K);
  const double lambda1 = smallest_eigenvalue(*grid);
  const double deltas[] = {0.1, 0.5, 1.0};
  const int orders[] = {0, 1, 5, 20};

  detail::Tracker lambda("lambda1 == 1", 0.0);
  lambda.observe(std::abs(lambda1 - 1.0));
  detail::Tracker leray_div("leray_project divergence-free", 1e-14);
  detail::Tracker leray_idem("leray_project idempotent", 1e-14);
  detail::Tracker leray_adj("leray_project self-adjoint", 1e-12);
  detail::Tracker sob("sobolev_norm s=1,2 vs stokes_apply", 1e-12);
  detail::Tracker poincare("Poincare ||w||^2 <= ||w||_1^2 / lambda1", 0.0);
  detail::Tracker tri("b(u,w,w) == 0", 1e-12);
  detail::Tracker anti("b(u,v,w) == -b(u,w,v)", 1e-12);
  detail::Tracker contraction("||H_N w||_s <= ||w||_s", 1e-12);
  detail::Tracker series("van_cittert_apply == truncation_hn", 1e-12);
  detail::Tracker smoothing("||H_N w||_{s+2} <= (N+1)/delta^2 ||w||_s", 1e-12);
  detail::Tracker commute("H_N commutes with G, A, P_L", 1e-14);
  detail::Tracker symbol("1 - H_N_hat == (d^2k2/(1+d^2k2))^{N+1}", 1e-14);
  detail::Tracker monotone("H_{N+1}_hat >= H_N_hat", 0.0);
  detail::Tracker grid_const("sup |k|^2 H_N_hat <= (N+1)/delta^2", 0.0);

  ProductWorkspace ws(*grid);
  for (int i = 0; i < fields; ++i) {
    const auto a = random_field(grid, seed + 1000 * i, false);
    const auto b = random_field(grid, seed + 1000 * i + 1, false);
    const auto pa = leray_project(a);
    leray_div.observe(max_relative_divergence(pa));
    leray_idem.observe(detail::rel_diff(leray_project(pa), pa));
    const double lhs = inner_product(pa, b), rhs = inner_product(a, leray_project(b));
    leray_adj.observe(std::abs(lhs - rhs) / (sobolev_norm(a, 0.0) * sobolev_norm(b, 0.0)));

    const auto u = random_field(grid, seed + 1000 * i + 2);
    const auto w = random_field(grid, seed + 1000 * i + 3);
    const auto v = random_field(grid, seed + 1000 * i + 4);
    const auto Aw = stokes_apply(w);
    sob.observe(std::abs(sobolev_norm(Aw, 0.0) - sobolev_norm(w, 2.0)) / sobolev_norm(w, 2.0));
    sob.observe(std::abs(inner_product(Aw, w) - sobolev_norm_sq(w, 1.0)) / sobolev_norm_sq(w, 1.0));
    poincare.observe(sobolev_norm_sq(w, 0.0) - sobolev_norm_sq(w, 1.0) / lambda1);

    const double scale = sobolev_norm(u, 0.0) * sobolev_norm(w, 1.0) * sobolev_norm(w, 0.0);
    tri.observe(std::abs(trilinear_b(u, w, w, ws)) / scale);
    const double b1 = trilinear_b(u, v, w, ws), b2 = trilinear_b(u, w, v, ws);
    anti.observe(std::abs(b1 + b2) /
                 (sobolev_norm(u, 0.0) * sobolev_norm(v, 1.0) * sobolev_norm(w, 1.0)));

    for (double d : deltas) {
      for (int n : orders) {
        const FilterParams p{d, n};
        const auto h = truncation_hn(w, p);
        for (double s : {0.0, 1.0, 2.0}) {
          const double nw = sobolev_norm(w, s);
          contraction.observe((sobolev_norm(h, s) - nw) / nw);
          smoothing.observe((sobolev_norm(h, s + 2.0) - admissible_smoothing_constant(p) * nw) /
                            (admissible_smoothing_constant(p) * nw));
        }
        series.observe(detail::rel_diff(van_cittert_apply(w, p), h));
        commute.observe(detail::rel_diff(truncation_hn(helmholtz_filter(a, d), p),
                                         helmholtz_filter(truncation_hn(a, p), d)));
        commute.observe(detail::rel_diff(truncation_hn(stokes_apply(a), p), stokes_apply(truncation_hn(a, p))));
        commute.observe(detail::rel_diff(truncation_hn(leray_project(a), p), leray_project(truncation_hn(a, p))));
      }
    }
  }

  for (double d : deltas) {
    for (int n = 0; n <= 20; ++n) {
      const FilterParams p{d, n};
      grid_const.observe(smoothing_constant(p, *grid) - admissible_smoothing_constant(p));
      for (int k2 = 0; k2 <= 3 * (K / 2) * (K / 2); ++k2) {
        const double a = d * d * k2;
        const double r = a / (1.0 + a);
        symbol.observe(std::abs((1.0 - hn_symbol(k2, d, n)) - std::pow(r, n + 1)));
        if (n < 20) monotone.observe(hn_symbol(k2, d, n) - hn_symbol(k2, d, n + 1));
      }
    }
  }

  return {lambda.result(),    leray_div.result(),   leray_idem.result(), leray_adj.result(),
          sob.result(),       poincare.result(),    tri.result(),        anti.result(),
          contraction.result(), series.result(),    smoothing.result(),  commute.result(),
          symbol.result(),    monotone.result(),    grid_const.result()};
}

}  // namespace deconv

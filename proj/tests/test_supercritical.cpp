#include <doctest.h>

#include <cmath>

#include "caplab/subcritical.hpp"
#include "caplab/supercritical.hpp"

using namespace caplab;

TEST_CASE("solution satisfies the saddle equations via the quadrature oracle") {
  const QuadratureGrid g = make_grid(200);
  const QuadratureGrid g400 = make_grid(400);
  const ModelPoint pt{0.5, 1.2};
  const RescaledOrderParams p = solve_supercritical(pt, g);
  CHECK(p.residual < 1e-9);
  CHECK(p.chi * p.E == doctest::Approx(pt.rho).epsilon(1e-14));
  CHECK(p.E > p.F1 - p.F0);
  CHECK(p.F0 > 0.0);
  CHECK(p.F1 > p.F0);
  CHECK(p.q0 > 0.0);
  CHECK(p.q0 < pt.rho);

  // recompute every right-hand side with the independent 400-node inner
  // quadrature paths
  double F1_rhs = 0.0, F0_rhs = 0.0, rho_rhs = 0.0, q0_rhs = 0.0, sel = 0.0;
  for (std::size_t i = 0; i < g400.nodes.size(); ++i) {
    const double z = g400.nodes[i];
    const double w = g400.weights[i];
    const InnerMomentsH m = inner_moments_h_quad(z, p.q0, pt.rho, p.chi, g400);
    F1_rhs += w * m.I2 / m.I0;
    F0_rhs += w * (m.I1 / m.I0) * (m.I1 / m.I0);
    const InnerMomentsXi x = inner_moments_xi_quad(z, p.F1, p.F0, p.E, g400);
    const double S = x.J0 / (x.J0 + std::exp(p.K));
    sel += w * S;
    rho_rhs += w * S * (x.J2 / x.J0);
    q0_rhs += w * S * S * (x.J1 / x.J0) * (x.J1 / x.J0);
  }
  F1_rhs *= pt.alpha / (p.chi * p.chi);
  F0_rhs *= pt.alpha / (p.chi * p.chi);
  rho_rhs /= p.E * p.E;
  q0_rhs /= p.E * p.E;
  CHECK(F1_rhs == doctest::Approx(p.F1).epsilon(1e-6));
  CHECK(F0_rhs == doctest::Approx(p.F0).epsilon(1e-6));
  CHECK(rho_rhs == doctest::Approx(pt.rho).epsilon(1e-6));
  CHECK(q0_rhs == doctest::Approx(p.q0).epsilon(1e-6));
  CHECK(sel == doctest::Approx(pt.rho).epsilon(1e-6));
}

TEST_CASE("warm started and cold started solves agree") {
  const QuadratureGrid g = make_grid(200);
  const RescaledOrderParams a = solve_supercritical({0.5, 1.2}, g);
  const RescaledOrderParams warm = solve_supercritical({0.5, 1.3}, g, {}, &a);
  const RescaledOrderParams cold = solve_supercritical_continued({0.5, 1.3}, g);
  CHECK(warm.F1 == doctest::Approx(cold.F1).epsilon(1e-6));
  CHECK(warm.F0 == doctest::Approx(cold.F0).epsilon(1e-6));
  CHECK(warm.E == doctest::Approx(cold.E).epsilon(1e-6));
  CHECK(warm.q0 == doctest::Approx(cold.q0).epsilon(1e-6));
  CHECK(warm.K == doctest::Approx(cold.K).epsilon(1e-6));
}

TEST_CASE("entropy is continuous at the transition and decreases above it") {
  const QuadratureGrid g = make_grid(200);
  const double rho = 0.5;
  const ModelPoint near{rho, 2.0 * rho * 1.001};
  const RescaledOrderParams p = solve_supercritical(near, g);
  CHECK(entropy_supercritical(near, p, g) ==
        doctest::Approx(entropy_subcritical(rho)).epsilon(1e-2));

  double prev = 1e9;
  RescaledOrderParams warm = p;
  for (double alpha : {1.05, 1.2, 1.4, 1.6}) {
    warm = solve_supercritical({rho, alpha}, g, {}, &warm);
    const double S = entropy_supercritical({rho, alpha}, warm, g);
    CHECK(S < prev);
    prev = S;
  }
  CHECK(prev > 0.0);  // still below capacity at alpha = 1.6
}

TEST_CASE("capacity at rho = 0.5") {
  const QuadratureGrid g = make_grid(200);
  const CapacityResult c = capacity_vs(0.5, g);
  CHECK(c.alpha_cg == doctest::Approx(1.0));
  CHECK(c.alpha_vs == doctest::Approx(1.7968799306).epsilon(1e-6));
  CHECK(c.sigma_residual < 1e-8);
  CHECK(c.alpha_vs > c.alpha_cg);
}

TEST_CASE("capacity edge cases") {
  const QuadratureGrid g = make_grid(200);
  const CapacityResult c1 = capacity_vs(1.0, g);
  CHECK(c1.alpha_vs == doctest::Approx(2.0));
  CHECK_THROWS_AS(capacity_vs(0.0, g), std::invalid_argument);
  CHECK_THROWS_AS(capacity_vs(1.5, g), std::invalid_argument);
}

TEST_CASE("regime guard") {
  const QuadratureGrid g = make_grid(100);
  CHECK_THROWS_AS(solve_supercritical({0.5, 0.9}, g), RegimeError);
  CHECK_THROWS_AS(solve_supercritical({0.5, 1.0}, g), RegimeError);
  CHECK_THROWS_AS(solve_supercritical_continued({0.5, 0.5}, g), RegimeError);
}

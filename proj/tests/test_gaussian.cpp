#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "caplab/gaussian.hpp"

using namespace caplab;

TEST_CASE("gauss_tail basic values") {
  CHECK(gauss_tail(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  // high-resolution reference for H(1)
  CHECK(gauss_tail(1.0) == doctest::Approx(0.15865525393145705).epsilon(1e-12));
  for (double x : {-3.0, -0.7, 0.0, 0.4, 2.5, 6.0})
    CHECK(gauss_tail(x) + gauss_tail(-x) == doctest::Approx(1.0).epsilon(1e-13));
  for (double x = -7.5; x < 7.5; x += 0.5)
    CHECK(gauss_tail(x + 0.25) < gauss_tail(x));
}

TEST_CASE("ln_gauss_tail matches log(H) and stays finite far out") {
  for (double x : {-5.0, -1.0, 0.0, 2.0, 7.9})
    CHECK(ln_gauss_tail(x) == doctest::Approx(std::log(gauss_tail(x))).epsilon(1e-12));
  // continuity across the switch to the continued fraction
  CHECK(ln_gauss_tail(8.0 + 1e-9) == doctest::Approx(ln_gauss_tail(8.0 - 1e-9)).epsilon(1e-9));
  const double x = 30.0;
  // leading asymptotics ln H ~ -x^2/2 - ln(x sqrt(2 pi))
  const double asym = -0.5 * x * x - std::log(x * std::sqrt(2.0 * M_PI));
  CHECK(ln_gauss_tail(x) == doctest::Approx(asym).epsilon(1e-2));
  CHECK(std::isfinite(ln_gauss_tail(200.0)));
}

TEST_CASE("gauss_tail_deriv_ratio limits") {
  CHECK(gauss_tail_deriv_ratio(0.0) ==
        doctest::Approx(-2.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-13));
  CHECK(gauss_tail_deriv_ratio(10.0) == doctest::Approx(-10.0).epsilon(0.01));
  CHECK(std::abs(gauss_tail_deriv_ratio(-10.0)) < 1e-6);
  // monotone decreasing and always negative-or-zero
  double prev = gauss_tail_deriv_ratio(-12.0);
  for (double x = -11.5; x <= 12.0; x += 0.5) {
    const double r = gauss_tail_deriv_ratio(x);
    CHECK(r <= 0.0);
    CHECK(r < prev + 1e-15);
    prev = r;
  }
}

TEST_CASE("make_grid moments and shape") {
  CHECK_THROWS_AS(make_grid(0), std::invalid_argument);
  const QuadratureGrid g1 = make_grid(1);
  CHECK(g1.nodes.size() == 1);
  CHECK(g1.nodes[0] == doctest::Approx(0.0));
  CHECK(g1.weights[0] == doctest::Approx(1.0));

  for (int order : {2, 7, 60, 200}) {
    const QuadratureGrid g = make_grid(order);
    double w = 0, m1 = 0, m2 = 0, m4 = 0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      w += g.weights[i];
      m1 += g.weights[i] * g.nodes[i];
      m2 += g.weights[i] * g.nodes[i] * g.nodes[i];
      m4 += g.weights[i] * std::pow(g.nodes[i], 4);
      CHECK(g.weights[i] > 0.0);
      if (i > 0) CHECK(g.nodes[i] > g.nodes[i - 1]);
    }
    CHECK(w == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(m1) < 1e-12);
    if (order >= 2) CHECK(m2 == doctest::Approx(1.0).epsilon(1e-10));
    if (order >= 3) CHECK(m4 == doctest::Approx(3.0).epsilon(1e-8));
  }
  const QuadratureGrid g60 = make_grid(60);
  const double m6 = g60.expect([](double z) { return std::pow(z, 6); });
  CHECK(m6 == doctest::Approx(15.0).epsilon(1e-8));
}

TEST_CASE("tilde_H branches") {
  CHECK(tilde_H(-3.0, 0.5) == 1.0);
  CHECK(tilde_H(0.0, 0.123) == 1.0);
  CHECK(tilde_H(1.0, 0.5) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK_THROWS_AS(tilde_H(1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(tilde_H(1.0, -2.0), std::domain_error);
}

TEST_CASE("inner H moments: closed form vs quadrature oracle") {
  const QuadratureGrid g400 = make_grid(400);
  const InnerMomentsH a = inner_moments_h(0.7, 0.2, 0.5, 0.3);
  const InnerMomentsH b = inner_moments_h_quad(0.7, 0.2, 0.5, 0.3, g400);
  CHECK(a.I0 == doctest::Approx(b.I0).epsilon(1e-8));
  CHECK(a.I1 == doctest::Approx(b.I1).epsilon(1e-8));
  CHECK(a.I2 == doctest::Approx(b.I2).epsilon(1e-8));

  std::mt19937 rng(123);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    const double rho = 0.1 + 0.9 * U(rng);
    const double q0 = rho * 0.95 * U(rng);
    const double chi = 0.05 + 3.0 * U(rng);
    const double z = -2.5 + 5.0 * U(rng);
    const InnerMomentsH c = inner_moments_h(z, q0, rho, chi);
    const InnerMomentsH q = inner_moments_h_quad(z, q0, rho, chi, g400);
    CHECK(c.I0 == doctest::Approx(q.I0).epsilon(1e-8));
    CHECK(c.I1 == doctest::Approx(q.I1).epsilon(1e-8));
    CHECK(c.I2 == doctest::Approx(q.I2).epsilon(1e-8));
    // invariants
    CHECK(c.I0 > 0.0);
    CHECK(c.I0 <= 1.0 + 1e-12);
    CHECK(c.I2 >= 0.0);
    CHECK(c.I1 * c.I1 <= c.I0 * c.I2 * (1.0 + 1e-10));
  }
}

TEST_CASE("inner H moments: special parameter regimes") {
  // q0 = 0 removes the z dependence
  const InnerMomentsH a = inner_moments_h(1.3, 0.0, 0.6, 0.4);
  const InnerMomentsH b = inner_moments_h(-2.1, 0.0, 0.6, 0.4);
  CHECK(a.I0 == doctest::Approx(b.I0).epsilon(1e-13));
  CHECK(a.I2 == doctest::Approx(b.I2).epsilon(1e-13));
  // huge chi makes the tilt trivial
  CHECK(inner_moments_h(0.3, 0.0, 1.0, 1e8).I0 == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(inner_moments_h(0.0, 0.5, 0.5, 1.0), std::domain_error);
  CHECK_THROWS_AS(inner_moments_h(0.0, 0.6, 0.5, 1.0), std::domain_error);
}

TEST_CASE("log-domain H moments agree with the plain form and survive extreme z") {
  const InnerMomentsHLog m = inner_moments_h_log(0.4, 0.1, 0.5, 0.7);
  const InnerMomentsH p = inner_moments_h(0.4, 0.1, 0.5, 0.7);
  CHECK(m.ratio21() == doctest::Approx(p.I2 / p.I0).epsilon(1e-12));
  CHECK(m.ratio11() == doctest::Approx(p.I1 / p.I0).epsilon(1e-12));
  CHECK(std::exp(m.ln_I0()) == doctest::Approx(p.I0).epsilon(1e-12));
  // at |z| = 20 the plain I0 underflows badly; log path must stay finite
  const InnerMomentsHLog far = inner_moments_h_log(20.0, 0.45, 0.5, 0.01);
  CHECK(std::isfinite(far.ln_I0()));
  CHECK(std::isfinite(far.ratio21()));
}

TEST_CASE("inner Xi moments: closed form vs quadrature oracle") {
  const QuadratureGrid g400 = make_grid(400);
  std::mt19937 rng(321);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    const double F0 = 0.1 + 2.0 * U(rng);
    const double F1 = F0 + 2.0 * U(rng);
    // keep the quadrature path itself convergent: (F1-F0)/E well below 1
    const double E = (F1 - F0) / (0.2 + 0.5 * U(rng));
    const double z = -2.0 + 4.0 * U(rng);
    const InnerMomentsXi c = inner_moments_xi(z, F1, F0, E);
    const InnerMomentsXi q = inner_moments_xi_quad(z, F1, F0, E, g400);
    CHECK(c.J0 == doctest::Approx(q.J0).epsilon(1e-8));
    CHECK(c.J1 == doctest::Approx(q.J1).epsilon(1e-8));
    CHECK(c.J2 == doctest::Approx(q.J2).epsilon(1e-8));
    CHECK(c.J0 >= 1.0 - 1e-12);
    CHECK(c.J2 >= 0.0);
    CHECK(c.J1 * c.J1 <= c.J0 * c.J2 * (1.0 + 1e-10));
  }
  CHECK_THROWS_AS(inner_moments_xi(0.0, 2.0, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(inner_moments_xi(0.0, 1.0, 2.0, 5.0), std::domain_error);
}

TEST_CASE("softplus and logistic") {
  CHECK(softplus(0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(softplus(100.0) == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(softplus(-50.0) == doctest::Approx(std::exp(-50.0)).epsilon(1e-10));
  CHECK(logistic(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(logistic(40.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(logistic(-40.0) == doctest::Approx(std::exp(-40.0)).epsilon(1e-10));
  for (double x : {-3.0, -0.5, 0.0, 1.5, 4.0})
    CHECK(logistic(x) + logistic(-x) == doctest::Approx(1.0).epsilon(1e-13));
}

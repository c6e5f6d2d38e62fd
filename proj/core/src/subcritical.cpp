#include "caplab/subcritical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace caplab {

namespace {

// Collapsed single-Gaussian form of the qhat1 equation: int Dt (H'(g t)/H(g t))^2.
double collapsed_ratio_integral(double gamma, const QuadratureGrid& grid) {
  return grid.expect([&](double t) {
    const double r = gauss_tail_deriv_ratio(gamma * t);
    return r * r;
  });
}

// int Dz ( int Dy H'(u)/H(u) )^2 with u = (sqrt(q1-q0) y + sqrt(q0) z)/sqrt(rho-q1).
double squared_mean_ratio_integral(double q1, double q0, double rho,
                                   const QuadratureGrid& grid) {
  const double sr = std::sqrt(rho - q1);
  const double a = std::sqrt(std::max(q1 - q0, 0.0)) / sr;
  const double b = std::sqrt(q0) / sr;
  return grid.expect([&](double z) {
    const double inner = grid.expect(
        [&](double y) { return gauss_tail_deriv_ratio(a * y + b * z); });
    return inner * inner;
  });
}

}  // namespace

double cover_gardner_capacity(double rho) {
  if (!(rho > 0.0 && rho <= 1.0))
    throw std::invalid_argument("cover_gardner_capacity: rho must be in (0, 1]");
  return 2.0 * rho;
}

double entropy_subcritical(double rho) {
  if (!(rho > 0.0 && rho <= 1.0))
    throw std::invalid_argument("entropy_subcritical: rho must be in (0, 1]");
  if (rho == 1.0) return 0.0;
  return -(1.0 - rho) * std::log(1.0 - rho) - rho * std::log(rho);
}

RSOrderParams solve_subcritical(const ModelPoint& point, const QuadratureGrid& grid,
                                const SolverOptions& opts) {
  point.validate();
  const double rho = point.rho;
  const double alpha = point.alpha;
  if (alpha >= cover_gardner_capacity(rho))
    throw RegimeError("solve_subcritical: alpha >= 2*rho, use the supercritical solver");

  const double eta = opts.damping;
  RSOrderParams p;

  // The q1/qhat1 pair closes in q1 alone:
  //   q1 = alpha*(rho - q1)/rho * int Dt (H'(gamma t)/H(gamma t))^2.
  double q1 = 0.5 * rho;
  int it1 = 0;
  double r1 = std::numeric_limits<double>::infinity();
  for (; it1 < opts.max_iter; ++it1) {
    const double gamma = std::sqrt(q1 / (rho - q1));
    double q1n = alpha * (rho - q1) / rho * collapsed_ratio_integral(gamma, grid);
    q1n = std::clamp(q1n, 0.0, rho * (1.0 - 1e-14));
    r1 = std::abs(q1n - q1);
    if (r1 < opts.tolerance) {
      q1 = q1n;
      break;
    }
    q1 = (1.0 - eta) * q1 + eta * q1n;
  }
  if (r1 >= opts.tolerance)
    throw ConvergenceError("solve_subcritical: q1 iteration did not converge", r1);

  const double Qp = rho / (rho - q1);  // Qhat + qhat1
  const double qhat1 = alpha / (rho - q1) *
                       collapsed_ratio_integral(std::sqrt(q1 / (rho - q1)), grid);

  // Inner q0/qhat0 loop at fixed q1:  q0 = rho^2 qhat0 / (Qhat + qhat1)^2.
  double q0 = 0.25 * rho;
  double qhat0 = 0.0;
  int it2 = 0;
  double r2 = std::numeric_limits<double>::infinity();
  for (; it2 < opts.max_iter; ++it2) {
    const double q0c = std::min(q0, q1);
    qhat0 = alpha / (rho - q1) * squared_mean_ratio_integral(q1, q0c, rho, grid);
    const double q0n = rho * rho * qhat0 / (Qp * Qp);
    r2 = std::abs(q0n - q0);
    if (r2 < opts.tolerance) {
      q0 = q0n;
      break;
    }
    q0 = (1.0 - eta) * q0 + eta * q0n;
  }
  if (r2 >= opts.tolerance)
    throw ConvergenceError("solve_subcritical: q0 iteration did not converge", r2);

  p.q1 = q1;
  p.q0 = q0;
  p.qhat1 = qhat1;
  p.qhat0 = qhat0;
  p.Qhat = Qp - qhat1;
  p.gamma = std::sqrt(q1 / (rho - q1));
  // rho = 1 makes selection trivial (classical Gardner); K -> -inf formally.
  p.K = rho < 1.0 ? std::log((1.0 - rho) / rho)
                  : -std::numeric_limits<double>::infinity();
  p.residual = std::max(std::abs(q1 - qhat1 * (rho - q1) * (rho - q1) / rho),
                        std::abs(q0 - qhat0 * (rho - q1) * (rho - q1)));
  p.iterations = it1 + it2;
  return p;
}

}  // namespace caplab

#include "caplab/at_stability.hpp"

#include <cmath>

namespace caplab {

double at_margin_subcritical(const ModelPoint& point, const RSOrderParams& p,
                             const QuadratureGrid& grid) {
  point.validate();
  const double rho = point.rho;
  const double sr = std::sqrt(rho - p.q1);
  const double a = std::sqrt(std::max(p.q1 - p.q0, 0.0)) / sr;
  const double b = std::sqrt(p.q0) / sr;
  // lambda_hat = (rho - q1)^2 / rho cancels the 1/(rho - q1)^2 in lambda, so the
  // margin reduces to a pure double Gaussian average of (u R(u) + R(u)^2)^2.
  const double lam = grid.expect([&](double z) {
    return grid.expect([&](double y) {
      const double u = a * y + b * z;
      const double R = gauss_tail_deriv_ratio(u);
      const double g = u * R + R * R;
      return g * g;
    });
  });
  return point.alpha / rho * lam - 1.0;
}

ATReport at_check(const ModelPoint& point, const RescaledOrderParams& p,
                  const QuadratureGrid& grid) {
  point.validate();
  const double rho = point.rho;
  ATReport rep;
  // lambda = alpha/chi^2 int Dz T0/I0 with T0 the Theta(v)-weighted zeroth moment.
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
    const InnerMomentsHLog m = inner_moments_h_log(grid.nodes[i], p.q0, rho, p.chi);
    acc += grid.weights[i] * m.ratio01();
  }
  rep.lambda = point.alpha / (p.chi * p.chi) * acc;
  // lambda_hat = int Dz sigma(ln J0 - K) / E^2 = rho/E^2 by the K constraint.
  double sel = 0.0;
  for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
    const InnerMomentsXiLog m =
        inner_moments_xi_log(grid.nodes[i], p.F1, p.F0, p.E);
    sel += grid.weights[i] * logistic(m.ln_J0 - p.K);
  }
  rep.lambda_hat = sel / (p.E * p.E);
  rep.margin = rep.lambda * rep.lambda_hat - 1.0;
  rep.stable = rep.margin < 0.0;
  return rep;
}

ATReport at_check_point(const ModelPoint& point, const QuadratureGrid& grid,
                        const SolverOptions& opts) {
  point.validate();
  ATReport rep;
  if (point.alpha < 2.0 * point.rho) {
    const RSOrderParams p = solve_subcritical(point, grid, opts);
    rep.margin = at_margin_subcritical(point, p, grid);
    rep.stable = rep.margin < 0.0;
    return rep;
  }
  const RescaledOrderParams p = solve_supercritical_continued(point, grid, opts);
  return at_check(point, p, grid);
}

}  // namespace caplab

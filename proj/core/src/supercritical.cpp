#include "caplab/supercritical.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace caplab {

namespace {

struct XiTable {
  std::vector<double> ln_J0, h_mean, h_var;
};

XiTable xi_table(const QuadratureGrid& grid, double F1, double F0, double E) {
  XiTable t;
  const std::size_t n = grid.nodes.size();
  t.ln_J0.resize(n);
  t.h_mean.resize(n);
  t.h_var.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const InnerMomentsXiLog m = inner_moments_xi_log(grid.nodes[i], F1, F0, E);
    t.ln_J0[i] = m.ln_J0;
    t.h_mean[i] = m.h_mean;
    t.h_var[i] = m.h_var;
  }
  return t;
}

// Selection constraint int Dz sigma(ln J0 - K) = rho fixes K; bisection.
double solve_K(const QuadratureGrid& grid, const XiTable& t, double rho) {
  double lo = t.ln_J0[0], hi = t.ln_J0[0];
  for (double v : t.ln_J0) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  lo -= 60.0;
  hi += 60.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    double sel = 0.0;
    for (std::size_t i = 0; i < t.ln_J0.size(); ++i)
      sel += grid.weights[i] * logistic(t.ln_J0[i] - mid);
    if (sel > rho)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

struct SuperResiduals {
  double rF1, rF0, rE, rq0;  // update minus current, natural units
  double K;
};

SuperResiduals residuals(const QuadratureGrid& grid, double rho, double alpha,
                         double F1, double F0, double E, double q0) {
  const double chi = rho / E;
  const XiTable t = xi_table(grid, F1, F0, E);
  const double K = solve_K(grid, t, rho);

  double rho_rhs = 0.0, q0_rhs = 0.0;
  for (std::size_t i = 0; i < t.ln_J0.size(); ++i) {
    const double S = logistic(t.ln_J0[i] - K);
    const double mh = t.h_mean[i];
    rho_rhs += grid.weights[i] * S * (mh * mh + t.h_var[i]);
    q0_rhs += grid.weights[i] * S * S * mh * mh;
  }
  rho_rhs /= E * E;
  q0_rhs /= E * E;

  double F1_rhs = 0.0, F0_rhs = 0.0;
  for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
    const InnerMomentsHLog m = inner_moments_h_log(grid.nodes[i], q0, rho, chi);
    const double r1 = m.ratio11();
    F1_rhs += grid.weights[i] * m.ratio21();
    F0_rhs += grid.weights[i] * r1 * r1;
  }
  F1_rhs *= alpha / (chi * chi);
  F0_rhs *= alpha / (chi * chi);

  return {F1_rhs - F1, F0_rhs - F0, rho_rhs - rho, q0_rhs - q0, K};
}

// Feasibility-preserving parametrization for Newton:
//   F1 = e^{u0}, F0 = F1*sigma(u1), E = (F1-F0) + e^{u2}, q0 = rho*sigma(u3).
Eigen::Vector4d pack(double F1, double F0, double E, double q0, double rho) {
  Eigen::Vector4d u;
  u(0) = std::log(F1);
  u(1) = std::log(F0 / (F1 - F0));
  u(2) = std::log(E - (F1 - F0));
  u(3) = std::log(q0 / (rho - q0));
  return u;
}

void unpack(const Eigen::Vector4d& u, double rho, double& F1, double& F0, double& E,
            double& q0) {
  F1 = std::exp(u(0));
  F0 = F1 * logistic(u(1));
  E = (F1 - F0) + std::exp(u(2));
  q0 = rho * logistic(u(3));
}

Eigen::Vector4d resid_rel(const QuadratureGrid& grid, double rho, double alpha,
                          const Eigen::Vector4d& u, double& K_out) {
  double F1, F0, E, q0;
  unpack(u, rho, F1, F0, E, q0);
  const SuperResiduals r = residuals(grid, rho, alpha, F1, F0, E, q0);
  K_out = r.K;
  Eigen::Vector4d out;
  out(0) = r.rF1 / F1;
  out(1) = r.rF0 / F0;
  out(2) = r.rE / rho;
  out(3) = r.rq0 / std::max(q0, 1e-10);
  return out;
}

}  // namespace

RescaledOrderParams solve_supercritical(const ModelPoint& point, const QuadratureGrid& grid,
                                        const SolverOptions& opts,
                                        const RescaledOrderParams* warm_start) {
  point.validate();
  const double rho = point.rho;
  const double alpha = point.alpha;
  if (alpha <= 2.0 * rho)
    throw RegimeError("solve_supercritical: alpha <= 2*rho, use the subcritical solver");

  double F1, F0, E, q0;
  int burn_iters = 0;
  if (warm_start) {
    F1 = warm_start->F1;
    F0 = warm_start->F0;
    E = warm_start->E;
    q0 = warm_start->q0;
  } else {
    // Damped fixed-point burn-in from a generic seed to get within Newton's basin.
    F1 = 1.0;
    F0 = 0.5;
    E = 20.0 * rho;
    q0 = 0.25 * rho;
    const double eta = 0.3;
    for (burn_iters = 0; burn_iters < 400; ++burn_iters) {
      const XiTable t = xi_table(grid, F1, F0, E);
      const double K = solve_K(grid, t, rho);
      double rho_m = 0.0, q0_m = 0.0;
      for (std::size_t i = 0; i < t.ln_J0.size(); ++i) {
        const double S = logistic(t.ln_J0[i] - K);
        const double mh = t.h_mean[i];
        rho_m += grid.weights[i] * S * (mh * mh + t.h_var[i]);
        q0_m += grid.weights[i] * S * S * mh * mh;
      }
      const double En = std::sqrt(rho_m / rho);
      const double q0n = q0_m / (E * E);
      const double chi = rho / E;
      double F1n = 0.0, F0n = 0.0;
      for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
        const InnerMomentsHLog m = inner_moments_h_log(grid.nodes[i], q0, rho, chi);
        const double r1 = m.ratio11();
        F1n += grid.weights[i] * m.ratio21();
        F0n += grid.weights[i] * r1 * r1;
      }
      F1n *= alpha / (chi * chi);
      F0n *= alpha / (chi * chi);

      double lam = eta;
      double F1t, F0t, Et;
      for (int k = 0; k < 25; ++k) {
        F1t = (1.0 - lam) * F1 + lam * F1n;
        F0t = (1.0 - lam) * F0 + lam * F0n;
        Et = (1.0 - lam) * E + lam * En;
        if (Et > F1t - F0t && F0t >= 0.0 && F1t >= F0t) break;
        lam *= 0.5;
      }
      const double q0t =
          std::clamp((1.0 - lam) * q0 + lam * q0n, 1e-12, rho * (1.0 - 1e-12));
      const double rel = std::max({std::abs(F1t - F1) / std::max(1.0, F1),
                                   std::abs(F0t - F0) / std::max(1.0, F0),
                                   std::abs(Et - E) / std::max(1.0, E),
                                   std::abs(q0t - q0)});
      F1 = F1t;
      F0 = F0t;
      E = Et;
      q0 = q0t;
      if (rel < 1e-6) break;
    }
  }

  Eigen::Vector4d u = pack(F1, F0, E, q0, rho);
  double K = 0.0;
  Eigen::Vector4d r = resid_rel(grid, rho, alpha, u, K);
  int it = 0;
  const int newton_max = 60;
  for (; it < newton_max; ++it) {
    const double rmax = r.cwiseAbs().maxCoeff();
    if (rmax < opts.tolerance) break;
    Eigen::Matrix4d J;
    for (int j = 0; j < 4; ++j) {
      const double h = 1e-7 * std::max(1.0, std::abs(u(j)));
      Eigen::Vector4d up = u;
      up(j) += h;
      double Kp;
      J.col(j) = (resid_rel(grid, rho, alpha, up, Kp) - r) / h;
    }
    Eigen::Vector4d dx = J.partialPivLu().solve(-r);
    if (!dx.allFinite())
      throw ConvergenceError("solve_supercritical: singular Newton system", rmax);
    double tstep = 1.0;
    Eigen::Vector4d un = u, rn = r;
    double Kn = K;
    while (true) {
      un = u + tstep * dx;
      bool ok = false;
      try {
        rn = resid_rel(grid, rho, alpha, un, Kn);
        ok = rn.allFinite();
      } catch (const std::exception&) {
        ok = false;  // step left the integrable region, shorten it
      }
      if (ok && (rn.cwiseAbs().maxCoeff() < rmax || tstep < 1e-3)) break;
      tstep *= 0.5;
      if (tstep <= 1e-6)
        throw ConvergenceError("solve_supercritical: line search failed", rmax);
    }
    u = un;
    r = rn;
    K = Kn;
  }
  const double rmax = r.cwiseAbs().maxCoeff();
  if (!(rmax < opts.tolerance))
    throw ConvergenceError("solve_supercritical: Newton did not converge", rmax);

  RescaledOrderParams p;
  unpack(u, rho, p.F1, p.F0, p.E, p.q0);
  p.chi = rho / p.E;
  p.K = K;
  p.residual = rmax;
  p.iterations = burn_iters + it;
  return p;
}

RescaledOrderParams solve_supercritical_continued(const ModelPoint& point,
                                                  const QuadratureGrid& grid,
                                                  const SolverOptions& opts) {
  point.validate();
  const double rho = point.rho;
  const double target = point.alpha;
  if (target <= 2.0 * rho)
    throw RegimeError("solve_supercritical_continued: alpha <= 2*rho");
  double a = 2.0 * rho * (1.0 + 1e-3);
  if (target <= a) return solve_supercritical(point, grid, opts);
  RescaledOrderParams sol = solve_supercritical({rho, a}, grid, opts);
  double step = 0.1;
  while (a < target) {
    const double a_try = std::min(a + step, target);
    try {
      sol = solve_supercritical({rho, a_try}, grid, opts, &sol);
      a = a_try;
      if (step < 0.1) step *= 2.0;
    } catch (const ConvergenceError&) {
      step *= 0.5;
      if (step < 1e-6) throw;
    }
  }
  return sol;
}

double entropy_supercritical(const ModelPoint& point, const RescaledOrderParams& p,
                             const QuadratureGrid& grid) {
  const double rho = point.rho;
  const double alpha = point.alpha;
  double energy_term = 0.0;
  for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
    const InnerMomentsHLog m = inner_moments_h_log(grid.nodes[i], p.q0, rho, p.chi);
    energy_term += grid.weights[i] * m.ln_I0();
  }
  const XiTable t = xi_table(grid, p.F1, p.F0, p.E);
  double sel_term = 0.0;
  for (std::size_t i = 0; i < t.ln_J0.size(); ++i)
    sel_term += grid.weights[i] * softplus(t.ln_J0[i] - p.K);
  return alpha * energy_term + sel_term + p.K * rho + 0.5 * (p.E - p.F1) * rho -
         0.5 * p.F1 * p.chi + 0.5 * p.F0 * p.q0;
}

CapacityResult capacity_vs(double rho, const QuadratureGrid& grid,
                           const SolverOptions& opts) {
  if (!(rho > 0.0 && rho <= 1.0))
    throw std::invalid_argument("capacity_vs: rho must be in (0, 1]");
  CapacityResult out;
  out.rho = rho;
  out.alpha_cg = 2.0 * rho;
  if (rho == 1.0) {
    // No selection freedom: the branch collapses onto classical Gardner.
    out.alpha_vs = 2.0;
    out.bracket_lo = out.bracket_hi = 2.0;
    out.sigma_residual = 0.0;
    return out;
  }

  const double a0 = out.alpha_cg * (1.0 + 1e-3);
  ModelPoint pt{rho, a0};
  RescaledOrderParams sol = solve_supercritical(pt, grid, opts);
  double sigma = entropy_supercritical(pt, sol, grid);
  if (sigma <= 0.0)
    throw ConvergenceError("capacity_vs: Sigma not positive just above alpha_CG", sigma);

  // Walk the branch up in alpha until Sigma changes sign; halve the step when a
  // warm-started solve fails.  The step never regrows: near the root the branch
  // is stiff and large warm-start gaps are what break Newton.
  double alpha_lo = a0, sigma_lo = sigma;
  RescaledOrderParams sol_lo = sol;
  double step = 0.1 * out.alpha_cg;
  double alpha_hi = 0.0, sigma_hi = 0.0;
  RescaledOrderParams sol_hi;
  bool bracketed = false;
  while (!bracketed) {
    const double a_try = alpha_lo + step;
    if (a_try > opts.alpha_scan_max)
      throw ConvergenceError("capacity_vs: Sigma stayed positive up to the scan limit",
                             sigma_lo);
    try {
      ModelPoint p{rho, a_try};
      RescaledOrderParams s = solve_supercritical(p, grid, opts, &sol_lo);
      const double sg = entropy_supercritical(p, s, grid);
      if (sg < 0.0) {
        alpha_hi = a_try;
        sigma_hi = sg;
        sol_hi = s;
        bracketed = true;
      } else {
        alpha_lo = a_try;
        sigma_lo = sg;
        sol_lo = s;
      }
    } catch (const ConvergenceError&) {
      step *= 0.5;
      if (step < 1e-6)
        throw ConvergenceError("capacity_vs: continuation stalled", sigma_lo);
    }
  }

  // Bisect Sigma to zero; retry each midpoint from the other bracket end if the
  // first warm start fails.
  double sigma_mid = sigma_lo;
  double alpha_mid = alpha_lo;
  for (int it = 0; it < 100; ++it) {
    alpha_mid = 0.5 * (alpha_lo + alpha_hi);
    ModelPoint p{rho, alpha_mid};
    RescaledOrderParams s;
    try {
      s = solve_supercritical(p, grid, opts, &sol_lo);
    } catch (const ConvergenceError&) {
      s = solve_supercritical(p, grid, opts, &sol_hi);
    }
    sigma_mid = entropy_supercritical(p, s, grid);
    if (std::abs(sigma_mid) < opts.sigma_tolerance) break;
    if (sigma_mid > 0.0) {
      alpha_lo = alpha_mid;
      sol_lo = s;
    } else {
      alpha_hi = alpha_mid;
      sol_hi = s;
    }
  }

  out.alpha_vs = alpha_mid;
  out.bracket_lo = alpha_lo;
  out.bracket_hi = alpha_hi;
  out.sigma_residual = std::abs(sigma_mid);
  return out;
}

}  // namespace caplab

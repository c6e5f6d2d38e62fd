#pragma once

#include "caplab/gaussian.hpp"
#include "caplab/model.hpp"

namespace caplab {

// Replica-symmetric order parameters below the Cover-Gardner load alpha < 2*rho.
struct RSOrderParams {
  double q1 = 0.0;      // intra-cluster overlap
  double q0 = 0.0;      // inter-cluster overlap
  double qhat1 = 0.0;
  double qhat0 = 0.0;
  double Qhat = 0.0;
  double K = 0.0;       // selection chemical potential, ln((1-rho)/rho)
  double gamma = 0.0;   // sqrt(q1/(rho-q1))
  double residual = 0.0;
  int iterations = 0;
};

// alpha_CG = 2*rho.
double cover_gardner_capacity(double rho);

// Binary entropy -(1-rho)ln(1-rho) - rho ln rho in nats (the cluster entropy
// for alpha < alpha_CG).  rho = 1 gives 0.
double entropy_subcritical(double rho);

// Damped fixed-point solve of the subcritical saddle-point equations.
// Throws RegimeError for alpha >= 2*rho and ConvergenceError on failure.
RSOrderParams solve_subcritical(const ModelPoint& point, const QuadratureGrid& grid,
                                const SolverOptions& opts = {});

}  // namespace caplab

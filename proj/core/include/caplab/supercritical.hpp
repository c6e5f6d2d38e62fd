#pragma once

#include "caplab/gaussian.hpp"
#include "caplab/model.hpp"

namespace caplab {

// Rescaled order parameters on the m -> 0 branch above alpha_CG = 2*rho.
// chi = rho/E holds identically at any solution and is stored for convenience.
struct RescaledOrderParams {
  double F1 = 0.0;
  double F0 = 0.0;
  double E = 0.0;
  double chi = 0.0;
  double q0 = 0.0;
  double K = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

// Solve the rescaled saddle-point equations at alpha > 2*rho.  Without a warm
// start the solver seeds itself with a damped fixed-point burn-in; with one it
// goes straight to Newton.  Throws RegimeError for alpha <= 2*rho.
RescaledOrderParams solve_supercritical(const ModelPoint& point, const QuadratureGrid& grid,
                                        const SolverOptions& opts = {},
                                        const RescaledOrderParams* warm_start = nullptr);

// Robust solve at arbitrary alpha > 2*rho: walks the branch up from just above
// alpha_CG with warm starts, halving the step on failure.  Slower than a direct
// warm-started solve but usable without any prior state.
RescaledOrderParams solve_supercritical_continued(const ModelPoint& point,
                                                  const QuadratureGrid& grid,
                                                  const SolverOptions& opts = {});

// Cluster entropy Sigma at a supercritical solution.  Approaches ln 2 + rho ln rho
// + (1-rho) ln(1-rho) + ... consistency: equals the subcritical binary entropy
// as alpha -> alpha_CG+ and decreases to 0 at the capacity.
double entropy_supercritical(const ModelPoint& point, const RescaledOrderParams& params,
                             const QuadratureGrid& grid);

struct CapacityResult {
  double rho = 0.0;
  double alpha_cg = 0.0;       // 2*rho
  double alpha_vs = 0.0;       // root of Sigma(alpha) = 0
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double sigma_residual = 0.0; // |Sigma| at alpha_vs
};

// Variable-selection capacity: continue the supercritical branch up in alpha and
// bisect Sigma to zero.  rho = 1 returns the classical value 2 directly.
CapacityResult capacity_vs(double rho, const QuadratureGrid& grid,
                           const SolverOptions& opts = {});

}  // namespace caplab

#pragma once

#include "caplab/gaussian.hpp"
#include "caplab/model.hpp"
#include "caplab/subcritical.hpp"
#include "caplab/supercritical.hpp"

namespace caplab {

// Replicon (de Almeida-Thouless) stability of a replica-symmetric solution.
// margin = lambda * lambda_hat - 1: negative means stable, zero marginal.
struct ATReport {
  double lambda = 0.0;
  double lambda_hat = 0.0;
  double margin = 0.0;
  bool stable = false;
};

// Margin for a subcritical solution.  lambda_hat collapses analytically here, so
// only q1 and q0 of the solution enter.
double at_margin_subcritical(const ModelPoint& point, const RSOrderParams& params,
                             const QuadratureGrid& grid);

// Full report for a supercritical solution.  On this branch lambda_hat = rho/E^2
// identically and the product lambda*lambda_hat sits at 1 up to solver residual,
// i.e. the branch is replicon-marginal everywhere.
ATReport at_check(const ModelPoint& point, const RescaledOrderParams& params,
                  const QuadratureGrid& grid);

// Convenience wrapper: solves the appropriate regime at the given point and
// reports the margin (subcritical reports lambda/lambda_hat as 0; only the
// margin is meaningful there).
ATReport at_check_point(const ModelPoint& point, const QuadratureGrid& grid,
                        const SolverOptions& opts = {});

}  // namespace caplab

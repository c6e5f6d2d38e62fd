#pragma once

#include <cstddef>
#include <vector>

// Gaussian special functions and the nested Gaussian-measure integrals used by
// the saddle-point solvers.  All expectations are taken against the standard
// Gaussian measure Dz = dz exp(-z^2/2)/sqrt(2*pi).

namespace caplab {

// Upper Gaussian tail H(x) = int_x^inf Dz.  Relative accuracy ~1e-12 for |x| <= 8.
double gauss_tail(double x);

// ln H(x), cancellation-safe for large positive x.
double ln_gauss_tail(double x);

// H'(x)/H(x) = -phi(x)/H(x).  Asymptotes to -x for x >> 1 and to 0 for x << -1.
double gauss_tail_deriv_ratio(double x);

// Standard Gaussian density.
double gauss_pdf(double x);

// Gauss-Hermite nodes/weights transformed to the probabilists' measure Dz.
// Weights sum to 1; polynomial moments up to degree 2*order-1 are exact.
struct QuadratureGrid {
  std::vector<double> nodes;    // strictly increasing
  std::vector<double> weights;  // positive, sum to 1
  int order = 0;

  // Expectation of f(z) under Dz.
  template <class F>
  double expect(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

QuadratureGrid make_grid(int order);

// H~(v, chi) = Theta(-v) + Theta(v) exp(-v^2/(2*chi)), with Theta(0) = 1.
double tilde_H(double v, double chi);

// y-moments of H~ at fixed outer node z, with v = sqrt(rho-q0)*y + sqrt(q0)*z:
//   I0 = E_y[H~],  I1 = E_y[H~ Theta(v) v],  I2 = E_y[H~ Theta(v) v^2].
struct InnerMomentsH {
  double I0 = 0.0;
  double I1 = 0.0;
  double I2 = 0.0;
};

// Closed-form evaluation (product of Gaussians -> truncated-Gaussian moments).
InnerMomentsH inner_moments_h(double z, double q0, double rho, double chi);

// Same moments by direct quadrature in y; cross-check path.
InnerMomentsH inner_moments_h_quad(double z, double q0, double rho, double chi,
                                   const QuadratureGrid& grid);

// Log-domain pieces of the H~ moments, safe at extreme |z| where both the
// Theta(-v) mass and the tilted mass underflow.  The full moments are
//   I0 = exp(ln_neg) + exp(ln_scale)*t0,  I1 = exp(ln_scale)*t1,  I2 = exp(ln_scale)*t2,
// and t0 is also the Theta(v)-weighted zeroth moment factor used by the AT check.
struct InnerMomentsHLog {
  double ln_neg = 0.0;    // ln E_y[Theta(-v)]
  double ln_scale = 0.0;  // ln of the common positive-branch prefactor
  double t0 = 0.0, t1 = 0.0, t2 = 0.0;

  double ratio21() const;  // I2/I0
  double ratio11() const;  // I1/I0
  double ratio01() const;  // E_y[H~ Theta(v)]/I0
  double ln_I0() const;
};

InnerMomentsHLog inner_moments_h_log(double z, double q0, double rho, double chi);

// y-moments of Xi~(h, E) = exp(h^2/(2E)) at fixed z, h = sqrt(F1-F0)*y + sqrt(F0)*z:
//   J0 = E_y[Xi~],  J1 = E_y[Xi~ h],  J2 = E_y[Xi~ h^2].
// Requires E > F1 - F0 for integrability.
struct InnerMomentsXi {
  double J0 = 0.0;
  double J1 = 0.0;
  double J2 = 0.0;
};

// Closed form via the Gaussian tilt identity.
InnerMomentsXi inner_moments_xi(double z, double F1, double F0, double E);

// Quadrature cross-check path (unreliable near E ~ F1-F0; oracle use only).
InnerMomentsXi inner_moments_xi_quad(double z, double F1, double F0, double E,
                                     const QuadratureGrid& grid);

// Log-domain form used by the solvers:  ln J0, and the tilted mean/variance of h
// so that J1/J0 = h_mean and J2/J0 = h_mean^2 + h_var.
struct InnerMomentsXiLog {
  double ln_J0 = 0.0;
  double h_mean = 0.0;
  double h_var = 0.0;
};

InnerMomentsXiLog inner_moments_xi_log(double z, double F1, double F0, double E);

// log(1 + e^x) and e^x/(1 + e^x), overflow-safe.
double softplus(double x);
double logistic(double x);

}  // namespace caplab

#pragma once

#include <stdexcept>
#include <string>

namespace caplab {

// One point of the (rho, alpha) phase diagram: rho is the variable selection
// ratio (fraction of dimensions allowed nonzero weight), alpha = P/N the
// pattern load.
struct ModelPoint {
  double rho = 0.5;
  double alpha = 1.0;

  void validate() const {
    if (!(rho > 0.0 && rho <= 1.0))
      throw std::invalid_argument("ModelPoint: rho must be in (0, 1]");
    if (!(alpha > 0.0)) throw std::invalid_argument("ModelPoint: alpha must be positive");
  }
};

struct SolverOptions {
  double tolerance = 1e-10;
  int max_iter = 5000;
  double damping = 0.5;
  double alpha_tolerance = 1e-4;   // capacity bracket width
  double alpha_scan_max = 6.0;     // upper end of the Sigma sign-change scan
  double sigma_tolerance = 1e-9;   // |Sigma| target at the capacity root
};

// Fixed-point / Newton iteration failed to reach tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// The requested (rho, alpha) point belongs to the other solver's regime.
class RegimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace caplab

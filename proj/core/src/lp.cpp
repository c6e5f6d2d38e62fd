#include "caplab/lp.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace caplab {

// Standard-form tableau simplex.  Variables, in column order:
//   w+ (d), w- (d), slack s (m), surplus t (m),
// constraints A(w+ - w-) + s - t = 1, everything >= 0, minimize sum s.
// The s columns give an immediate feasible basis (rhs = 1).
double margin_lp_objective(const Eigen::MatrixXd& A) {
  const int m = static_cast<int>(A.rows());
  const int d = static_cast<int>(A.cols());
  if (m == 0) return 0.0;
  const int n = 2 * d + 2 * m;

  Eigen::MatrixXd T(m, n);
  T.block(0, 0, m, d) = A;
  T.block(0, d, m, d) = -A;
  T.block(0, 2 * d, m, m) = Eigen::MatrixXd::Identity(m, m);
  T.block(0, 2 * d + m, m, m) = -Eigen::MatrixXd::Identity(m, m);
  Eigen::VectorXd b = Eigen::VectorXd::Ones(m);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  c.segment(2 * d, m).setOnes();

  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = 2 * d + i;

  const double eps = 1e-9;
  const long max_pivots = 200L * (m + n);
  for (long pivot = 0; pivot < max_pivots; ++pivot) {
    // reduced costs via the basic cost vector (basis columns stay unit under
    // explicit row reduction below)
    Eigen::VectorXd cb(m);
    for (int i = 0; i < m; ++i) cb(i) = c(basis[i]);
    // entering: Bland (lowest index with negative reduced cost)
    int enter = -1;
    for (int j = 0; j < n; ++j) {
      const double rc = c(j) - cb.dot(T.col(j));
      if (rc < -eps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) {
      double obj = 0.0;
      for (int i = 0; i < m; ++i) obj += c(basis[i]) * b(i);
      return obj;
    }
    // leaving: min ratio, ties to lowest basis index (Bland)
    int leave = -1;
    double best = 0.0;
    for (int i = 0; i < m; ++i) {
      const double a = T(i, enter);
      if (a > eps) {
        const double ratio = b(i) / a;
        if (leave < 0 || ratio < best - 1e-12 ||
            (std::abs(ratio - best) <= 1e-12 && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
    }
    if (leave < 0)
      throw std::runtime_error("margin_lp_objective: unbounded phase-1 problem");
    // pivot
    const double piv = T(leave, enter);
    T.row(leave) /= piv;
    b(leave) /= piv;
    for (int i = 0; i < m; ++i) {
      if (i == leave) continue;
      const double f = T(i, enter);
      if (f != 0.0) {
        T.row(i) -= f * T.row(leave);
        b(i) -= f * b(leave);
      }
    }
    basis[leave] = enter;
  }
  throw std::runtime_error("margin_lp_objective: pivot limit exceeded");
}

bool linearly_separable(const Eigen::MatrixXd& A, double tol) {
  return margin_lp_objective(A) < tol;
}

bool perceptron_separates(const Eigen::MatrixXd& A, long max_updates) {
  const int m = static_cast<int>(A.rows());
  const int d = static_cast<int>(A.cols());
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  long updates = 0;
  while (updates < max_updates) {
    bool clean = true;
    for (int i = 0; i < m; ++i) {
      if (A.row(i).dot(w) <= 0.0) {
        w += A.row(i).transpose();
        ++updates;
        clean = false;
      }
    }
    if (clean) return true;
  }
  return false;
}

}  // namespace caplab

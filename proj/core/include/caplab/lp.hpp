#pragma once

#include <Eigen/Core>

namespace caplab {

// Optimal value of  min sum_i s_i  s.t.  A w + s >= 1, s >= 0, w free.
// Zero iff the rows of A admit a common strictly-positive inner product
// direction (Gordan-type alternative).  Dense simplex with Bland's rule.
double margin_lp_objective(const Eigen::MatrixXd& A);

// margin_lp_objective(A) below tolerance.
bool linearly_separable(const Eigen::MatrixXd& A, double tol = 1e-7);

// Perceptron updates on the rows of A until all margins are positive or the
// update budget runs out.  Never a false positive; used as a cross-check.
bool perceptron_separates(const Eigen::MatrixXd& A, long max_updates);

}  // namespace caplab

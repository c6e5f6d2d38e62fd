#pragma once

#include <vector>

#include "caplab/biht.hpp"
#include "caplab/lp.hpp"

namespace caplab {

// Rows y_mu * x_mu restricted to the given columns.
Eigen::MatrixXd signed_patterns(const Dataset& data, const std::vector<int>& cols);

// Can some w supported on `cols` classify every pattern with positive margin.
bool separable_on_subset(const Dataset& data, const std::vector<int>& cols);

// Exhaustive search over all column subsets of size M.  Throws if C(N, M)
// exceeds max_subsets.  A quick conflict scan (identical restricted pattern,
// opposite labels) prunes subsets before the LP runs.
bool separable_any_subset(const Dataset& data, int M,
                          long max_subsets = 1000000);

}  // namespace caplab

#include "caplab/separability.hpp"

#include <algorithm>
#include <stdexcept>

namespace caplab {

namespace {

long binomial_guarded(int n, int k, long cap) {
  long r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > cap) return cap + 1;
  }
  return r;
}

// Two patterns that agree on every kept column but carry opposite labels make
// the subset infeasible without any LP work.
bool has_label_conflict(const Dataset& data, const std::vector<int>& cols) {
  const int P = data.P;
  for (int i = 0; i < P; ++i) {
    for (int j = i + 1; j < P; ++j) {
      if (data.y(i) == data.y(j)) continue;
      bool same = true;
      for (int c : cols) {
        if (data.X(i, c) != data.X(j, c)) {
          same = false;
          break;
        }
      }
      if (same) return true;
    }
  }
  return false;
}

}  // namespace

Eigen::MatrixXd signed_patterns(const Dataset& data, const std::vector<int>& cols) {
  Eigen::MatrixXd A(data.P, static_cast<int>(cols.size()));
  for (int i = 0; i < data.P; ++i)
    for (std::size_t k = 0; k < cols.size(); ++k)
      A(i, static_cast<int>(k)) = data.y(i) * data.X(i, cols[k]);
  return A;
}

bool separable_on_subset(const Dataset& data, const std::vector<int>& cols) {
  for (int c : cols)
    if (c < 0 || c >= data.N)
      throw std::invalid_argument("separable_on_subset: column index out of range");
  if (has_label_conflict(data, cols)) return false;
  return linearly_separable(signed_patterns(data, cols));
}

bool separable_any_subset(const Dataset& data, int M, long max_subsets) {
  if (M < 1 || M > data.N)
    throw std::invalid_argument("separable_any_subset: M out of range");
  if (binomial_guarded(data.N, M, max_subsets) > max_subsets)
    throw std::invalid_argument("separable_any_subset: subset count over limit");
  std::vector<int> cols(M);
  for (int i = 0; i < M; ++i) cols[i] = i;
  while (true) {
    if (separable_on_subset(data, cols)) return true;
    // next combination in lexicographic order
    int i = M - 1;
    while (i >= 0 && cols[i] == data.N - M + i) --i;
    if (i < 0) return false;
    ++cols[i];
    for (int j = i + 1; j < M; ++j) cols[j] = cols[j - 1] + 1;
  }
}

}  // namespace caplab

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace caplab {

// Random classification instance: P patterns (rows of X) with labels y in {-1,+1}.
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  int N = 0;
  int P = 0;
};

// Binary: entries of X in {-1,+1}.  Spherical: rows uniform on the sphere of
// squared norm N.
enum class PatternKind { Binary, Spherical };

// Deterministic per-seed generation; the seed is mixed so that nearby seeds give
// independent-looking streams.
Dataset generate_dataset(int N, int P, PatternKind kind, std::uint64_t seed);

struct BIHTConfig {
  double tau = 0.0;                    // gradient step; <= 0 selects 0.002/P
  double eps = 1e-8;                   // per-iteration movement threshold
  int max_stage_iter = 1000;
  bool shared_iteration_budget = false;  // one budget across all greedy stages
  bool init_scale_multiply = false;      // w0 ~ N(0,1)*sqrt(N) instead of /sqrt(N)
  std::uint64_t rng_seed = 0;
};

struct TrialResult {
  bool success = false;
  int K = 0;              // sparsity level reached
  int iterations = 0;     // total inner iterations across stages
  double rho_used = 0;    // K/N
  double objective = 0;   // hinge objective at the final iterate
  std::vector<int> support;  // nonzero coordinates of the final iterate
};

// Keep the K largest-magnitude entries of a, zeroing the rest.  Ties keep the
// lowest index.  Requires 1 <= K <= len(a).
Eigen::VectorXd hard_threshold(const Eigen::VectorXd& a, int K);

// Same, but entries in `fixed` are always kept and only K - |fixed| extra slots
// are filled from the remaining coordinates.  Requires |fixed| <= K <= len(a).
Eigen::VectorXd hard_threshold_with_support(const Eigen::VectorXd& a, int K,
                                            const std::vector<int>& fixed);

// Sum of the negative parts of y .* (X w); zero iff every pattern is classified
// (up to the sign(0) = +1 convention checked separately).
double biht_objective(const Dataset& data, const Eigen::VectorXd& w);

// Number of misclassified patterns under sign(0) = +1.
int misclassified(const Dataset& data, const Eigen::VectorXd& w);

struct BIHTRunResult {
  Eigen::VectorXd w;              // final iterate, normalized to unit norm
  std::vector<double> err_trace;  // per-iteration movement N^-1 ||w_l - w_{l-1}||
  int iterations = 0;
};

// Iterative hard thresholding at fixed sparsity K from the given start:
//   a <- w + (tau/2) X^T (y - sign(Xw)),  w <- eta_K(a | fixed)
// until the movement drops below eps or the budget runs out.
BIHTRunResult biht_run(const Dataset& data, int K, Eigen::VectorXd w_init,
                       const std::vector<int>& fixed, const BIHTConfig& cfg);

// Greedy sparsity schedule: run BIHT at K = 1, 2, ... (keeping the previous
// support fixed) until all patterns are classified or K = N.
TrialResult greedy_biht(const Dataset& data, const BIHTConfig& cfg);

}  // namespace caplab

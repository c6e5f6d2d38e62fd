#include "caplab/biht.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <utility>

namespace caplab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 seeded_engine(std::uint64_t seed) {
  return std::mt19937_64(splitmix64(seed));
}

double sgn(double x) { return x >= 0.0 ? 1.0 : -1.0; }

// Unnormalized stage iteration shared by biht_run and the greedy driver.
Eigen::VectorXd stage(const Dataset& data, Eigen::VectorXd w, int K,
                      const std::vector<int>& fixed, const BIHTConfig& cfg,
                      int budget, int& iters, std::vector<double>* trace) {
  const double tau = cfg.tau > 0.0 ? cfg.tau : 0.002 / data.P;
  iters = 0;
  double err = std::numeric_limits<double>::infinity();
  while (err > cfg.eps && iters < budget) {
    ++iters;
    Eigen::VectorXd s = data.X * w;
    for (int i = 0; i < data.P; ++i) s(i) = sgn(s(i));
    const Eigen::VectorXd a =
        w + 0.5 * tau * (data.X.transpose() * (data.y - s));
    Eigen::VectorXd wn = hard_threshold_with_support(a, K, fixed);
    err = (wn - w).norm() / data.N;
    if (trace) trace->push_back(err);
    w = std::move(wn);
  }
  return w;
}

}  // namespace

Dataset generate_dataset(int N, int P, PatternKind kind, std::uint64_t seed) {
  if (N < 1 || P < 1)
    throw std::invalid_argument("generate_dataset: N and P must be positive");
  Dataset d;
  d.N = N;
  d.P = P;
  d.X.resize(P, N);
  d.y.resize(P);
  std::mt19937_64 eng = seeded_engine(seed);
  if (kind == PatternKind::Binary) {
    std::bernoulli_distribution coin(0.5);
    for (int i = 0; i < P; ++i)
      for (int j = 0; j < N; ++j) d.X(i, j) = coin(eng) ? 1.0 : -1.0;
  } else {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < P; ++i) {
      for (int j = 0; j < N; ++j) d.X(i, j) = gauss(eng);
      d.X.row(i) *= std::sqrt(double(N)) / d.X.row(i).norm();
    }
  }
  std::bernoulli_distribution coin(0.5);
  for (int i = 0; i < P; ++i) d.y(i) = coin(eng) ? 1.0 : -1.0;
  return d;
}

Eigen::VectorXd hard_threshold(const Eigen::VectorXd& a, int K) {
  if (K < 1 || K > a.size())
    throw std::invalid_argument("hard_threshold: K out of range");
  return hard_threshold_with_support(a, K, {});
}

Eigen::VectorXd hard_threshold_with_support(const Eigen::VectorXd& a, int K,
                                            const std::vector<int>& fixed) {
  const int n = static_cast<int>(a.size());
  if (K < static_cast<int>(fixed.size()) || K > n)
    throw std::invalid_argument("hard_threshold_with_support: K out of range");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  std::vector<char> is_fixed(n, 0);
  for (int j : fixed) {
    if (j < 0 || j >= n)
      throw std::invalid_argument("hard_threshold_with_support: index out of range");
    is_fixed[j] = 1;
    w(j) = a(j);
  }
  int extra = K - static_cast<int>(fixed.size());
  if (extra <= 0) return w;
  std::vector<int> free_idx;
  free_idx.reserve(n);
  for (int j = 0; j < n; ++j)
    if (!is_fixed[j]) free_idx.push_back(j);
  // stable sort keeps the lowest index first among equal magnitudes
  std::stable_sort(free_idx.begin(), free_idx.end(), [&](int i, int j) {
    return std::abs(a(i)) > std::abs(a(j));
  });
  extra = std::min(extra, static_cast<int>(free_idx.size()));
  for (int k = 0; k < extra; ++k) w(free_idx[k]) = a(free_idx[k]);
  return w;
}

double biht_objective(const Dataset& data, const Eigen::VectorXd& w) {
  const Eigen::VectorXd m = data.y.cwiseProduct(data.X * w);
  double obj = 0.0;
  for (int i = 0; i < data.P; ++i)
    if (m(i) < 0.0) obj -= m(i);
  return obj;
}

int misclassified(const Dataset& data, const Eigen::VectorXd& w) {
  const Eigen::VectorXd m = data.X * w;
  int bad = 0;
  for (int i = 0; i < data.P; ++i)
    if (sgn(m(i)) != data.y(i)) ++bad;
  return bad;
}

BIHTRunResult biht_run(const Dataset& data, int K, Eigen::VectorXd w_init,
                       const std::vector<int>& fixed, const BIHTConfig& cfg) {
  if (K < static_cast<int>(fixed.size()) || K > data.N)
    throw std::invalid_argument("biht_run: K out of range");
  if (!w_init.allFinite())
    throw std::invalid_argument("biht_run: w_init must be finite");
  BIHTRunResult out;
  out.w = stage(data, std::move(w_init), K, fixed, cfg, cfg.max_stage_iter,
                out.iterations, &out.err_trace);
  const double nrm = out.w.norm();
  if (nrm > 0.0) out.w /= nrm;
  return out;
}

TrialResult greedy_biht(const Dataset& data, const BIHTConfig& cfg) {
  std::mt19937_64 eng = seeded_engine(cfg.rng_seed ^ 0x5deece66dULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double scale = cfg.init_scale_multiply ? std::sqrt(double(data.N))
                                               : 1.0 / std::sqrt(double(data.N));
  Eigen::VectorXd w(data.N);
  for (int j = 0; j < data.N; ++j) w(j) = gauss(eng) * scale;

  TrialResult res;
  int budget_left = cfg.max_stage_iter;
  int K = 1;
  int its = 0;
  w = stage(data, std::move(w), K, {}, cfg,
            cfg.shared_iteration_budget ? budget_left : cfg.max_stage_iter, its,
            nullptr);
  res.iterations += its;
  budget_left -= its;
  while (misclassified(data, w) > 0 && K < data.N) {
    if (cfg.shared_iteration_budget && budget_left <= 0) break;
    ++K;
    std::vector<int> support;
    for (int j = 0; j < data.N; ++j)
      if (w(j) != 0.0) support.push_back(j);
    w = stage(data, std::move(w), K, support, cfg,
              cfg.shared_iteration_budget ? budget_left : cfg.max_stage_iter, its,
              nullptr);
    res.iterations += its;
    budget_left -= its;
  }
  res.success = misclassified(data, w) == 0;
  res.K = K;
  res.rho_used = static_cast<double>(K) / data.N;
  res.objective = biht_objective(data, w);
  for (int j = 0; j < data.N; ++j)
    if (w(j) != 0.0) res.support.push_back(j);
  return res;
}

}  // namespace caplab

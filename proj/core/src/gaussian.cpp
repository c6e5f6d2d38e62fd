#include "caplab/gaussian.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace caplab {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;
constexpr double kLnSqrt2Pi = 0.9189385332046727;

// Mills ratio H(x)/phi(x) for large positive x, by Lentz continued fraction
//   H/phi = 1/(x + 1/(x + 2/(x + 3/(x + ...)))).
double mills_ratio_cf(double x) {
  const double tiny = 1e-300;
  double f = x != 0.0 ? x : tiny;
  double c = f;
  double d = 0.0;
  for (int n = 1; n < 200; ++n) {
    const double an = static_cast<double>(n);
    d = x + an * d;
    if (d == 0.0) d = tiny;
    c = x + an / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return 1.0 / f;
}

}  // namespace

double gauss_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double gauss_tail(double x) { return 0.5 * std::erfc(x / kSqrt2); }

double ln_gauss_tail(double x) {
  if (x < 8.0) return std::log(gauss_tail(x));
  return -0.5 * x * x - kLnSqrt2Pi + std::log(mills_ratio_cf(x));
}

double gauss_tail_deriv_ratio(double x) {
  if (x > 8.0) return -1.0 / mills_ratio_cf(x);
  if (x < -40.0) return -0.0;  // phi/H underflows to 0
  return -gauss_pdf(x) / gauss_tail(x);
}

QuadratureGrid make_grid(int order) {
  if (order < 1) throw std::invalid_argument("make_grid: order must be >= 1");
  QuadratureGrid grid;
  grid.order = order;
  if (order == 1) {
    grid.nodes = {0.0};
    grid.weights = {1.0};
    return grid;
  }
  // Golub-Welsch on the probabilists' Hermite Jacobi matrix (zero diagonal,
  // off-diagonal sqrt(k)); weights are squared first eigenvector components.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double b = std::sqrt(static_cast<double>(k));
    J(k - 1, k) = b;
    J(k, k - 1) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  grid.nodes.resize(order);
  grid.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    grid.nodes[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    grid.weights[i] = v0 * v0;
  }
  return grid;
}

double tilde_H(double v, double chi) {
  if (chi <= 0.0) throw std::domain_error("tilde_H: chi must be positive");
  if (v < 0.0) return 1.0;
  return std::exp(-v * v / (2.0 * chi));
}

InnerMomentsHLog inner_moments_h_log(double z, double q0, double rho, double chi) {
  if (q0 < 0.0 || q0 >= rho)
    throw std::domain_error("inner_moments_h: requires 0 <= q0 < rho");
  if (chi <= 0.0) throw std::domain_error("inner_moments_h: chi must be positive");
  const double mu = std::sqrt(q0) * z;   // mean of v over y
  const double s2 = rho - q0;            // variance of v over y
  const double s = std::sqrt(s2);

  InnerMomentsHLog m;
  m.ln_neg = ln_gauss_tail(mu / s);

  // Gaussian product: N(v; mu, s2) * exp(-v^2/(2chi)) = C0 * N(v; mt, 1/A)
  const double A = 1.0 / s2 + 1.0 / chi;
  const double B = mu / s2;
  const double mt = B / A;
  const double st = 1.0 / std::sqrt(A);
  m.ln_scale = -std::log(s) - 0.5 * std::log(A) - 0.5 * (mu * mu / s2 - B * B / A);

  // truncated moments of N(mt, st^2) over v > 0
  const double r = mt / st;
  const double Hm = gauss_tail(-r);
  const double ph = gauss_pdf(r);
  m.t0 = Hm;
  m.t1 = mt * Hm + st * ph;
  m.t2 = (mt * mt + st * st) * Hm + mt * st * ph;
  return m;
}

namespace {
double safe_exp_diff(double a, double b) {
  // exp(a - b) clamped against overflow
  const double d = a - b;
  return std::exp(d > 700.0 ? 700.0 : d);
}
}  // namespace

double InnerMomentsHLog::ratio21() const { return t2 / (safe_exp_diff(ln_neg, ln_scale) + t0); }
double InnerMomentsHLog::ratio11() const { return t1 / (safe_exp_diff(ln_neg, ln_scale) + t0); }
double InnerMomentsHLog::ratio01() const { return t0 / (safe_exp_diff(ln_neg, ln_scale) + t0); }

double InnerMomentsHLog::ln_I0() const {
  const double lp = ln_scale + std::log(t0 > 0.0 ? t0 : std::numeric_limits<double>::min());
  const double hi = ln_neg > lp ? ln_neg : lp;
  return hi + std::log(std::exp(ln_neg - hi) + std::exp(lp - hi));
}

InnerMomentsH inner_moments_h(double z, double q0, double rho, double chi) {
  const InnerMomentsHLog m = inner_moments_h_log(z, q0, rho, chi);
  const double scale = std::exp(m.ln_scale);
  InnerMomentsH out;
  out.I0 = std::exp(m.ln_neg) + scale * m.t0;
  out.I1 = scale * m.t1;
  out.I2 = scale * m.t2;
  return out;
}

namespace {

// 24-point Gauss-Legendre rule on [-1, 1], again by Golub-Welsch
struct LegendreRule {
  std::vector<double> nodes, weights;
  LegendreRule() {
    const int n = 24;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
      const double b = k / std::sqrt(4.0 * k * k - 1.0);
      J(k - 1, k) = b;
      J(k, k - 1) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
      nodes[i] = es.eigenvalues()(i);
      const double v0 = es.eigenvectors()(0, i);
      weights[i] = 2.0 * v0 * v0;
    }
  }
};

// composite panel integration, roughly one panel per unit length
template <typename F>
double integrate_panels(F&& f, double lo, double hi, int panels_per_unit) {
  static const LegendreRule rule;
  if (hi <= lo) return 0.0;
  const int panels =
      std::max(4, static_cast<int>(std::ceil((hi - lo) * panels_per_unit)));
  const double h = (hi - lo) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double c = lo + (p + 0.5) * h;
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      acc += rule.weights[i] * f(c + 0.5 * h * rule.nodes[i]);
    total += 0.5 * h * acc;
  }
  return total;
}

}  // namespace

InnerMomentsH inner_moments_h_quad(double z, double q0, double rho, double chi,
                                   const QuadratureGrid& grid) {
  if (q0 < 0.0 || q0 >= rho)
    throw std::domain_error("inner_moments_h_quad: requires 0 <= q0 < rho");
  if (chi <= 0.0) throw std::domain_error("inner_moments_h_quad: chi must be positive");
  const double a = std::sqrt(rho - q0);
  const double b = std::sqrt(q0);
  // direct integration over y of phi(y) * tildeH(a y + b z) * {1, v, v^2};
  // the integrand has a kink where v changes sign, so split the range there
  // instead of using the Gauss-Hermite grid, which converges too slowly for a
  // reference value.  Panel density scales with the requested grid order.
  const int density = std::max(1, grid.order / 100);
  const double y0 = -b * z / a;
  const double lo = std::min(-45.0, y0);
  const double hi = std::max(45.0, y0);
  InnerMomentsH out;
  out.I0 = integrate_panels(
      [&](double y) { return gauss_pdf(y) * tilde_H(a * y + b * z, chi); }, lo, y0,
      density);
  out.I0 += integrate_panels(
      [&](double y) { return gauss_pdf(y) * tilde_H(a * y + b * z, chi); }, y0, hi,
      density);
  out.I1 = integrate_panels(
      [&](double y) {
        const double v = a * y + b * z;
        return gauss_pdf(y) * tilde_H(v, chi) * v;
      },
      y0, hi, density);
  out.I2 = integrate_panels(
      [&](double y) {
        const double v = a * y + b * z;
        return gauss_pdf(y) * tilde_H(v, chi) * v * v;
      },
      y0, hi, density);
  return out;
}

InnerMomentsXiLog inner_moments_xi_log(double z, double F1, double F0, double E) {
  if (F0 < 0.0 || F1 < F0)
    throw std::domain_error("inner_moments_xi: requires 0 <= F0 <= F1");
  const double a2 = F1 - F0;
  if (E <= a2)
    throw std::domain_error("inner_moments_xi: diverges unless E > F1 - F0");
  const double b = std::sqrt(F0);
  const double c = 1.0 - a2 / E;
  const double beta = std::sqrt(a2) * b * z / E;
  InnerMomentsXiLog m;
  m.ln_J0 = -0.5 * std::log(c) + b * b * z * z / (2.0 * E) + beta * beta / (2.0 * c);
  m.h_mean = b * z / c;  // = sqrt(a2)*beta/c + b*z
  m.h_var = a2 / c;
  return m;
}

InnerMomentsXi inner_moments_xi(double z, double F1, double F0, double E) {
  const InnerMomentsXiLog m = inner_moments_xi_log(z, F1, F0, E);
  InnerMomentsXi out;
  out.J0 = std::exp(m.ln_J0);
  out.J1 = out.J0 * m.h_mean;
  out.J2 = out.J0 * (m.h_mean * m.h_mean + m.h_var);
  return out;
}

InnerMomentsXi inner_moments_xi_quad(double z, double F1, double F0, double E,
                                     const QuadratureGrid& grid) {
  if (F0 < 0.0 || F1 < F0)
    throw std::domain_error("inner_moments_xi_quad: requires 0 <= F0 <= F1");
  if (E <= F1 - F0)
    throw std::domain_error("inner_moments_xi_quad: diverges unless E > F1 - F0");
  const double a = std::sqrt(F1 - F0);
  const double b = std::sqrt(F0);
  // the integrand phi(y) exp(h^2 / 2E) with h = a y + b z is itself a Gaussian
  // of curvature c = 1 - a^2/E, possibly much wider than the Gauss-Hermite
  // weight and centered far from zero; integrate it directly over its own
  // support in the log domain to avoid both slow convergence and overflow
  const double c = 1.0 - a * a / E;
  const double mu = a * b * z / (E * c);
  const double halfwidth = 45.0 / std::sqrt(c);
  const auto g = [&](double y) {
    const double h = a * y + b * z;
    return -0.5 * y * y + h * h / (2.0 * E) - kLnSqrt2Pi;
  };
  const double gmax = g(mu);
  const int density = std::max(1, grid.order / 100);
  const auto moment = [&](int k) {
    return integrate_panels(
        [&](double y) {
          const double h = a * y + b * z;
          double f = std::exp(g(y) - gmax);
          for (int j = 0; j < k; ++j) f *= h;
          return f;
        },
        mu - halfwidth, mu + halfwidth, density);
  };
  const double scale = std::exp(gmax);
  InnerMomentsXi out;
  out.J0 = scale * moment(0);
  out.J1 = scale * moment(1);
  out.J2 = scale * moment(2);
  return out;
}

double softplus(double x) {
  if (x > 35.0) return x;
  return std::log1p(std::exp(x));
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace caplab

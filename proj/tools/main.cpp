// capacity-lab: sweep driver around the caplab library.  Emits plot-ready CSV;
// exit code 0 on full success, 2 when some rows failed, 1 on configuration
// errors.

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "caplab/at_stability.hpp"
#include "caplab/biht.hpp"
#include "caplab/separability.hpp"
#include "caplab/subcritical.hpp"
#include "caplab/supercritical.hpp"

using namespace caplab;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key = value file with [section] headers; '#' starts a comment.
class Config {
 public:
  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    Config cfg;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw ConfigError("malformed section header at line " + std::to_string(lineno));
        section = trim(line.substr(1, line.size() - 2));
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("expected key = value at line " + std::to_string(lineno));
      cfg.values_[section + "/" + trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return cfg;
  }

  std::optional<std::string> get(const std::string& section, const std::string& key) const {
    const auto it = values_.find(section + "/" + key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  std::string str(const std::string& s, const std::string& k, const std::string& dflt) const {
    return get(s, k).value_or(dflt);
  }
  double num(const std::string& s, const std::string& k, double dflt) const {
    const auto v = get(s, k);
    if (!v) return dflt;
    return parse_num(*v, s + "/" + k);
  }
  double num_req(const std::string& s, const std::string& k) const {
    const auto v = get(s, k);
    if (!v) throw ConfigError("missing required key " + s + "/" + k);
    return parse_num(*v, s + "/" + k);
  }
  long integer(const std::string& s, const std::string& k, long dflt) const {
    return static_cast<long>(num(s, k, static_cast<double>(dflt)));
  }
  bool flag(const std::string& s, const std::string& k, bool dflt) const {
    const auto v = get(s, k);
    if (!v) return dflt;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw ConfigError("expected boolean for " + s + "/" + k);
  }

  // "a,b,c" or "lo:hi:step" (inclusive endpoints up to rounding)
  std::vector<double> grid(const std::string& s, const std::string& k) const {
    const auto v = get(s, k);
    if (!v) throw ConfigError("missing required key " + s + "/" + k);
    std::vector<double> out;
    if (v->find(':') != std::string::npos) {
      double lo, hi, step;
      char c1, c2;
      std::istringstream is(*v);
      if (!(is >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0)
        throw ConfigError("malformed range for " + s + "/" + k);
      for (double x = lo; x <= hi + 1e-12 * std::max(1.0, std::abs(hi)); x += step)
        out.push_back(x);
    } else {
      std::istringstream is(*v);
      std::string tok;
      while (std::getline(is, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) out.push_back(parse_num(tok, s + "/" + k));
      }
    }
    if (out.empty()) throw ConfigError("empty grid for " + s + "/" + k);
    for (std::size_t i = 1; i < out.size(); ++i)
      if (out[i] <= out[i - 1])
        throw ConfigError("grid " + s + "/" + k + " must be strictly increasing");
    return out;
  }

 private:
  static std::string trim(std::string s) {
    const auto notspace = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
    s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
    return s;
  }
  static double parse_num(const std::string& v, const std::string& where) {
    std::size_t pos = 0;
    double x;
    try {
      x = std::stod(v, &pos);
    } catch (const std::exception&) {
      throw ConfigError("not a number for " + where + ": " + v);
    }
    if (pos != v.size()) throw ConfigError("trailing junk for " + where + ": " + v);
    return x;
  }

  std::map<std::string, std::string> values_;
};

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

struct Row {
  std::string csv;
  bool ok = true;
};

// Run fn(i) for i in [0, n) on `jobs` threads; rows land in input order.
template <class Fn>
std::vector<Row> run_cells(std::size_t n, int jobs, Fn&& fn) {
  std::vector<Row> rows(n);
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) rows[i] = fn(i);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const int nthreads = std::min<std::size_t>(jobs, n);
  for (int t = 0; t < nthreads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
        rows[i] = fn(i);
    });
  }
  for (auto& th : pool) th.join();
  return rows;
}

int write_csv(const std::string& path, const std::string& header,
              const std::vector<Row>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path);
  out << header << "\n";
  bool all_ok = true;
  for (const auto& r : rows) {
    out << r.csv << "\n";
    all_ok = all_ok && r.ok;
  }
  return all_ok ? 0 : 2;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t cell_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b,
                        std::uint64_t c) {
  return mix64(mix64(mix64(base ^ a) ^ b) ^ c);
}

SolverOptions solver_options(const Config& cfg) {
  SolverOptions o;
  o.tolerance = cfg.num("solver", "tolerance", o.tolerance);
  o.max_iter = static_cast<int>(cfg.integer("solver", "max_iter", o.max_iter));
  o.damping = cfg.num("solver", "damping", o.damping);
  o.alpha_scan_max = cfg.num("solver", "alpha_scan_max", o.alpha_scan_max);
  o.sigma_tolerance = cfg.num("solver", "sigma_tolerance", o.sigma_tolerance);
  return o;
}

BIHTConfig biht_config(const Config& cfg, const std::string& sec) {
  BIHTConfig b;
  b.tau = cfg.num(sec, "tau", 0.0);
  b.eps = cfg.num(sec, "eps", b.eps);
  b.max_stage_iter = static_cast<int>(cfg.integer(sec, "stage_iter", b.max_stage_iter));
  b.shared_iteration_budget = cfg.flag(sec, "shared_budget", false);
  b.init_scale_multiply = cfg.flag(sec, "init_multiply", false);
  return b;
}

PatternKind pattern_kind(const Config& cfg, const std::string& sec) {
  const std::string p = cfg.str(sec, "pattern", "binary");
  if (p == "binary") return PatternKind::Binary;
  if (p == "spherical") return PatternKind::Spherical;
  throw ConfigError("pattern must be binary or spherical");
}

int cmd_rs_profile(const Config& cfg, const std::string& out, int jobs) {
  const std::string sec = "rs-profile";
  const double rho = cfg.num_req(sec, "rho");
  const std::vector<double> alphas = cfg.grid(sec, "alphas");
  const int order = static_cast<int>(cfg.integer(sec, "quad_order", 200));
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("rs-profile: rho must be in (0, 1)");
  const QuadratureGrid grid = make_grid(order);
  const SolverOptions opts = solver_options(cfg);
  const double acg = cover_gardner_capacity(rho);

  const auto rows = run_cells(alphas.size(), jobs, [&](std::size_t i) -> Row {
    const double alpha = alphas[i];
    const ModelPoint pt{rho, alpha};
    std::ostringstream os;
    try {
      if (alpha < acg) {
        const RSOrderParams p = solve_subcritical(pt, grid, opts);
        const double margin = at_margin_subcritical(pt, p, grid);
        os << fmt(alpha) << ",subcritical," << fmt(p.q1) << "," << fmt(p.q0)
           << ",," << fmt(entropy_subcritical(rho)) << "," << fmt(margin) << ",ok";
      } else if (alpha == acg) {
        // exact limit values at the transition: q1 -> rho, Sigma continuous,
        // margin -> 0; neither solver converges on the point itself
        os << fmt(alpha) << ",critical," << fmt(rho) << ",,,"
           << fmt(entropy_subcritical(rho)) << "," << fmt(0.0) << ",ok";
      } else {
        const RescaledOrderParams p = solve_supercritical_continued(pt, grid, opts);
        const double q1 = rho;  // rescaled branch: q1 -> rho as m -> 0
        const double sigma = entropy_supercritical(pt, p, grid);
        const ATReport at = at_check(pt, p, grid);
        os << fmt(alpha) << ",supercritical," << fmt(q1) << "," << fmt(p.q0) << ","
           << fmt(p.chi) << "," << fmt(sigma) << "," << fmt(at.margin) << ",ok";
      }
      return {os.str(), true};
    } catch (const std::exception& e) {
      os.str("");
      os << fmt(alpha) << ",,,,,,,error: " << e.what();
      return {os.str(), false};
    }
  });
  return write_csv(out, "alpha,regime,q1,q0,chi,Sigma,at_margin,status", rows);
}

int cmd_capacity_curve(const Config& cfg, const std::string& out, int jobs) {
  const std::string sec = "capacity-curve";
  const std::vector<double> rhos = cfg.grid(sec, "rhos");
  const int order = static_cast<int>(cfg.integer(sec, "quad_order", 200));
  for (double r : rhos)
    if (!(r > 0.0 && r < 1.0)) throw ConfigError("capacity-curve: rhos must lie in (0, 1)");
  const QuadratureGrid grid = make_grid(order);
  const SolverOptions opts = solver_options(cfg);

  const auto rows = run_cells(rhos.size(), jobs, [&](std::size_t i) -> Row {
    const double rho = rhos[i];
    std::ostringstream os;
    try {
      const CapacityResult c = capacity_vs(rho, grid, opts);
      os << fmt(rho) << "," << fmt(c.alpha_cg) << "," << fmt(c.alpha_vs) << ","
         << fmt(c.sigma_residual) << ",ok";
      return {os.str(), true};
    } catch (const std::exception& e) {
      os << fmt(rho) << "," << fmt(2.0 * rho) << ",,,error: " << e.what();
      return {os.str(), false};
    }
  });
  return write_csv(out, "rho,alpha_cg,alpha_vs,sigma_residual,status", rows);
}

int cmd_at_check(const Config& cfg, const std::string& out, int jobs) {
  const std::string sec = "at-check";
  const double rho = cfg.num_req(sec, "rho");
  const std::vector<double> alphas = cfg.grid(sec, "alphas");
  const int order = static_cast<int>(cfg.integer(sec, "quad_order", 200));
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("at-check: rho must be in (0, 1)");
  const QuadratureGrid grid = make_grid(order);
  const SolverOptions opts = solver_options(cfg);
  const double acg = cover_gardner_capacity(rho);

  const auto rows = run_cells(alphas.size(), jobs, [&](std::size_t i) -> Row {
    const double alpha = alphas[i];
    std::ostringstream os;
    try {
      if (alpha == acg) {
        // marginal in the limit from either side
        os << fmt(alpha) << ",critical," << fmt(0.0) << ",,,false,ok";
        return {os.str(), true};
      }
      const ATReport at = at_check_point({rho, alpha}, grid, opts);
      const bool sub = alpha < acg;
      os << fmt(alpha) << "," << (sub ? "subcritical" : "supercritical") << ","
         << fmt(at.margin) << ",";
      if (!sub) os << fmt(at.lambda);
      os << ",";
      if (!sub) os << fmt(at.lambda_hat);
      os << "," << (at.stable ? "true" : "false") << ",ok";
      return {os.str(), true};
    } catch (const std::exception& e) {
      os << fmt(alpha) << ",,,,,,error: " << e.what();
      return {os.str(), false};
    }
  });
  return write_csv(out, "alpha,regime,margin,lambda,lambda_hat,stable,status", rows);
}

std::string agg_path(const std::string& out) {
  const std::string suffix = ".csv";
  if (out.size() > suffix.size() &&
      out.compare(out.size() - suffix.size(), suffix.size(), suffix) == 0)
    return out.substr(0, out.size() - suffix.size()) + "_agg.csv";
  return out + "_agg.csv";
}

int cmd_simulate(const Config& cfg, const std::string& out, std::uint64_t seed,
                 int jobs) {
  const std::string sec = "simulate";
  const std::vector<double> Ns = cfg.grid(sec, "N");
  const std::vector<double> alphas = cfg.grid(sec, "alphas");
  const long trials = cfg.integer(sec, "trials", 100);
  if (trials < 1) throw ConfigError("simulate: trials must be >= 1");
  const PatternKind kind = pattern_kind(cfg, sec);
  const BIHTConfig base = biht_config(cfg, sec);
  const std::string ensemble = kind == PatternKind::Binary ? "binary" : "spherical";

  struct Cell {
    int N, P, trial;
    double alpha;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (std::size_t ni = 0; ni < Ns.size(); ++ni) {
    const int N = static_cast<int>(Ns[ni]);
    if (N < 1) throw ConfigError("simulate: N must be >= 1");
    for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
      const int P = static_cast<int>(std::lround(alphas[ai] * N));
      if (P < 1) throw ConfigError("simulate: alpha*N rounds to zero patterns");
      for (long t = 0; t < trials; ++t)
        cells.push_back({N, P, static_cast<int>(t), alphas[ai],
                         cell_seed(seed, ni, ai, static_cast<std::uint64_t>(t))});
    }
  }

  std::vector<TrialResult> results(cells.size());
  std::vector<char> failed(cells.size(), 0);
  const auto rows = run_cells(cells.size(), jobs, [&](std::size_t i) -> Row {
    const Cell& c = cells[i];
    std::ostringstream os;
    try {
      const Dataset d = generate_dataset(c.N, c.P, kind, c.seed);
      BIHTConfig bc = base;
      bc.rng_seed = c.seed;
      const TrialResult r = greedy_biht(d, bc);
      results[i] = r;
      os << c.N << "," << c.P << "," << fmt(c.alpha) << "," << ensemble << ","
         << c.seed << "," << (r.success ? 1 : 0) << "," << r.K << ","
         << fmt(r.rho_used) << "," << r.iterations << ",ok";
      return {os.str(), true};
    } catch (const std::exception& e) {
      failed[i] = 1;
      os << c.N << "," << c.P << "," << fmt(c.alpha) << "," << ensemble << ","
         << c.seed << ",,,,,error: " << e.what();
      return {os.str(), false};
    }
  });
  const int rc = write_csv(
      out, "N,P,alpha,ensemble,seed,success,K_final,rho_used,iterations_total,status",
      rows);

  // aggregate per (N, alpha); rho_used summaries over successful trials
  std::vector<Row> agg;
  for (std::size_t ni = 0; ni < Ns.size(); ++ni) {
    for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
      std::vector<double> rho_ok;
      int P = 0, n_ok = 0, n_valid = 0;
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].N != static_cast<int>(Ns[ni]) || cells[i].alpha != alphas[ai])
          continue;
        P = cells[i].P;
        if (failed[i]) continue;
        ++n_valid;
        if (results[i].success) {
          ++n_ok;
          rho_ok.push_back(results[i].rho_used);
        }
      }
      std::ostringstream os;
      os << static_cast<int>(Ns[ni]) << "," << P << "," << fmt(alphas[ai]) << ","
         << n_valid << ",";
      if (n_valid > 0) os << fmt(static_cast<double>(n_ok) / n_valid);
      os << ",";
      if (!rho_ok.empty()) {
        double mean = 0.0;
        for (double r : rho_ok) mean += r;
        mean /= rho_ok.size();
        std::sort(rho_ok.begin(), rho_ok.end());
        const std::size_t h = rho_ok.size() / 2;
        const double median = rho_ok.size() % 2 ? rho_ok[h]
                                                : 0.5 * (rho_ok[h - 1] + rho_ok[h]);
        os << fmt(mean) << "," << fmt(median);
      } else {
        os << ",";
      }
      os << "," << (n_valid == static_cast<int>(trials) ? "ok" : "partial");
      agg.push_back({os.str(), n_valid == static_cast<int>(trials)});
    }
  }
  const int rc2 = write_csv(
      agg_path(out), "N,P,alpha,trials,success_rate,mean_rho_used,median_rho_used,status",
      agg);
  return std::max(rc, rc2);
}

int cmd_oracle(const Config& cfg, const std::string& out, std::uint64_t seed,
               int jobs) {
  const std::string sec = "oracle";
  const int N = static_cast<int>(cfg.num_req(sec, "N"));
  const int M = static_cast<int>(cfg.num_req(sec, "M"));
  const std::vector<double> Ps = cfg.grid(sec, "P");
  const long datasets = cfg.integer(sec, "datasets", 200);
  const PatternKind kind = pattern_kind(cfg, sec);
  if (N < 1 || N > 20) throw ConfigError("oracle: requires 1 <= N <= 20");
  if (M < 1 || M > N) throw ConfigError("oracle: requires 1 <= M <= N");
  if (datasets < 1) throw ConfigError("oracle: datasets must be >= 1");
  // C(N, M) guard before any work
  double nsub = 1.0;
  for (int i = 1; i <= M; ++i) nsub = nsub * (N - M + i) / i;
  if (nsub > 1e6) throw ConfigError("oracle: C(N, M) exceeds the enumeration guard");
  std::vector<int> fixed_cols(M);
  for (int i = 0; i < M; ++i) fixed_cols[i] = i;

  const auto rows = run_cells(Ps.size(), jobs, [&](std::size_t pi) -> Row {
    const int P = static_cast<int>(Ps[pi]);
    std::ostringstream os;
    try {
      if (P < 1) throw ConfigError("oracle: P must be >= 1");
      long any_ok = 0, fixed_ok = 0;
      for (long t = 0; t < datasets; ++t) {
        const Dataset d = generate_dataset(
            N, P, kind, cell_seed(seed, pi, 0, static_cast<std::uint64_t>(t)));
        if (separable_on_subset(d, fixed_cols)) {
          ++fixed_ok;
          ++any_ok;  // the fixed subset is one of the candidates
        } else if (separable_any_subset(d, M)) {
          ++any_ok;
        }
      }
      os << fmt(static_cast<double>(M) / N) << "," << N << "," << M << "," << P << ","
         << fmt(static_cast<double>(any_ok) / datasets) << ","
         << fmt(static_cast<double>(fixed_ok) / datasets) << ",ok";
      return {os.str(), true};
    } catch (const std::exception& e) {
      os.str("");
      os << fmt(static_cast<double>(M) / N) << "," << N << "," << M << "," << P
         << ",,,error: " << e.what();
      return {os.str(), false};
    }
  });
  return write_csv(out, "rho,N,M,P,prob_any_subset,prob_fixed_subset,status", rows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "capacity-lab: replica saddle-point solvers, capacity curves, stability "
      "checks, and greedy-BIHT simulations for the sparse perceptron"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  std::uint64_t seed = 1;
  int jobs = 1;
  app.add_option("--config", config_path, "key = value config file with [command] sections")
      ->required();
  app.add_option("--out", out_path, "output CSV path (default <command>.csv)");
  app.add_option("--seed", seed, "base RNG seed (default 1)");
  app.add_option("--jobs", jobs, "worker threads (default 1)")->check(CLI::PositiveNumber);

  auto* rs = app.add_subcommand(
      "rs-profile",
      "order parameters, entropy, and stability margin over an alpha grid at fixed rho\n"
      "config keys [rs-profile]: rho (required), alphas (required; list or lo:hi:step),\n"
      "quad_order (200)");
  auto* cap = app.add_subcommand(
      "capacity-curve",
      "Cover-Gardner line and the selection capacity over a rho grid\n"
      "config keys [capacity-curve]: rhos (required), quad_order (200)");
  auto* at = app.add_subcommand(
      "at-check",
      "replicon stability margin over an alpha grid at fixed rho\n"
      "config keys [at-check]: rho (required), alphas (required), quad_order (200)");
  auto* sim = app.add_subcommand(
      "simulate",
      "greedy-BIHT trials over (N, alpha) cells\n"
      "config keys [simulate]: N (required), alphas (required), trials (100),\n"
      "pattern (binary), tau (0.002/P), eps (1e-8), stage_iter (1000),\n"
      "shared_budget (false), init_multiply (false)");
  auto* orc = app.add_subcommand(
      "oracle",
      "exact subset-separability probabilities at desk scale (N <= 20)\n"
      "config keys [oracle]: N (required), M (required), P (required grid),\n"
      "datasets (200), pattern (binary)");

  for (auto* sub : {rs, cap, at, sim, orc}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    const Config cfg = Config::load(config_path);
    if (rs->parsed()) {
      if (out_path.empty()) out_path = "rs-profile.csv";
      return cmd_rs_profile(cfg, out_path, jobs);
    }
    if (cap->parsed()) {
      if (out_path.empty()) out_path = "capacity-curve.csv";
      return cmd_capacity_curve(cfg, out_path, jobs);
    }
    if (at->parsed()) {
      if (out_path.empty()) out_path = "at-check.csv";
      return cmd_at_check(cfg, out_path, jobs);
    }
    if (sim->parsed()) {
      if (out_path.empty()) out_path = "simulate.csv";
      return cmd_simulate(cfg, out_path, seed, jobs);
    }
    if (orc->parsed()) {
      if (out_path.empty()) out_path = "oracle.csv";
      return cmd_oracle(cfg, out_path, seed, jobs);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}

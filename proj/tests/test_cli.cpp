#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::string g_bin;     // capacity-lab executable
std::string g_tmpdir;  // scratch directory for configs and outputs

int run(const std::string& args) {
  const std::string cmd = g_bin + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    rows.push_back(cells);
  }
  return rows;
}

std::string tmp(const std::string& name) { return g_tmpdir + "/" + name; }

}  // namespace

TEST_CASE("config errors exit with code 1") {
  CHECK(run("rs-profile --config " + tmp("missing.cfg")) == 1);
  write_file(tmp("bad.cfg"), "[rs-profile]\nrho = 0.5\n");  // no alphas
  CHECK(run("rs-profile --config " + tmp("bad.cfg")) == 1);
  write_file(tmp("bad2.cfg"), "[rs-profile]\nrho = 0.5\nalphas = 1.0,0.5\n");
  CHECK(run("rs-profile --config " + tmp("bad2.cfg")) == 1);  // not increasing
  write_file(tmp("bad3.cfg"), "[oracle]\nN = 25\nM = 2\nP = 2\n");
  CHECK(run("oracle --config " + tmp("bad3.cfg")) == 1);  // N over the guard
}

TEST_CASE("rs-profile sweep crossing the transition") {
  write_file(tmp("rs.cfg"),
             "[rs-profile]\n"
             "rho = 0.5\n"
             "alphas = 0.4,0.8,1.0,1.2,1.4\n");
  CHECK(run("rs-profile --config " + tmp("rs.cfg") + " --out " + tmp("rs.csv")) == 0);
  const auto rows = read_csv(tmp("rs.csv"));
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == std::vector<std::string>{"alpha", "regime", "q1", "q0", "chi",
                                            "Sigma", "at_margin", "status"});
  const double ln2 = std::log(2.0);
  double prev_sigma = 10.0;
  double prev_margin = -10.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].size() == 8);
    CHECK(rows[i][7] == "ok");
    const double alpha = std::stod(rows[i][0]);
    const double sigma = std::stod(rows[i][5]);
    const double margin = std::stod(rows[i][6]);
    if (alpha < 1.0) {
      CHECK(rows[i][1] == "subcritical");
      CHECK(rows[i][4] == "");  // chi not defined below the transition
      CHECK(sigma == doctest::Approx(ln2).epsilon(1e-10));
      CHECK(margin < 0.0);
    } else if (alpha > 1.0) {
      CHECK(rows[i][1] == "supercritical");
      CHECK(std::stod(rows[i][4]) > 0.0);
      CHECK(sigma < prev_sigma);
    }
    // the margin changes sign within one grid step of the transition
    if (alpha >= 1.0) CHECK(margin > -1e-6);
    if (alpha > 1.0) prev_sigma = sigma;
    CHECK(margin >= prev_margin - 1e-6);
    prev_margin = margin;
  }
}

TEST_CASE("capacity-curve row contracts") {
  write_file(tmp("cap.cfg"), "[capacity-curve]\nrhos = 0.3,0.5\n");
  CHECK(run("capacity-curve --config " + tmp("cap.cfg") + " --out " + tmp("cap.csv")) == 0);
  const auto rows = read_csv(tmp("cap.csv"));
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double rho = std::stod(rows[i][0]);
    const double acg = std::stod(rows[i][1]);
    const double avs = std::stod(rows[i][2]);
    CHECK(acg == doctest::Approx(2.0 * rho).epsilon(1e-14));
    CHECK(avs > acg);
    CHECK(std::stod(rows[i][3]) < 1e-8);
    CHECK(rows[i][4] == "ok");
  }
}

TEST_CASE("simulate determinism and aggregate schema") {
  write_file(tmp("sim.cfg"),
             "[simulate]\n"
             "N = 24\n"
             "alphas = 1.2\n"
             "trials = 10\n");
  CHECK(run("simulate --config " + tmp("sim.cfg") + " --seed 5 --out " + tmp("s1.csv")) == 0);
  CHECK(run("simulate --config " + tmp("sim.cfg") + " --seed 5 --out " + tmp("s2.csv")) == 0);
  CHECK(read_file(tmp("s1.csv")) == read_file(tmp("s2.csv")));
  CHECK(read_file(tmp("s1_agg.csv")) == read_file(tmp("s2_agg.csv")));
  // a different seed changes the trials
  CHECK(run("simulate --config " + tmp("sim.cfg") + " --seed 6 --out " + tmp("s3.csv")) == 0);
  CHECK(read_file(tmp("s1.csv")) != read_file(tmp("s3.csv")));

  const auto agg = read_csv(tmp("s1_agg.csv"));
  REQUIRE(agg.size() == 2);
  CHECK(agg[0] == std::vector<std::string>{"N", "P", "alpha", "trials", "success_rate",
                                           "mean_rho_used", "median_rho_used", "status"});
  const double rate = std::stod(agg[1][4]);
  CHECK(rate >= 0.0);
  CHECK(rate <= 1.0);

  const auto trialrows = read_csv(tmp("s1.csv"));
  REQUIRE(trialrows.size() == 11);
  CHECK(trialrows[0][0] == "N");
  for (std::size_t i = 1; i < trialrows.size(); ++i) {
    CHECK(trialrows[i][0] == "24");
    CHECK(trialrows[i][3] == "binary");
    CHECK(trialrows[i][9] == "ok");
  }
}

TEST_CASE("oracle probabilities") {
  write_file(tmp("orc.cfg"),
             "[oracle]\n"
             "N = 8\n"
             "M = 4\n"
             "P = 1,6,10\n"
             "datasets = 40\n");
  CHECK(run("oracle --config " + tmp("orc.cfg") + " --seed 3 --out " + tmp("o1.csv")) == 0);
  const auto rows = read_csv(tmp("o1.csv"));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == std::vector<std::string>{"rho", "N", "M", "P", "prob_any_subset",
                                            "prob_fixed_subset", "status"});
  // P = 1 row: both probabilities exactly 1
  CHECK(std::stod(rows[1][4]) == doctest::Approx(1.0));
  CHECK(std::stod(rows[1][5]) == doctest::Approx(1.0));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::stod(rows[i][4]) >= std::stod(rows[i][5]));  // set inclusion
    CHECK(rows[i][6] == "ok");
  }
  // determinism
  CHECK(run("oracle --config " + tmp("orc.cfg") + " --seed 3 --out " + tmp("o2.csv")) == 0);
  CHECK(read_file(tmp("o1.csv")) == read_file(tmp("o2.csv")));
}

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: test_cli <capacity-lab binary> [doctest args]\n");
    return 2;
  }
  g_bin = argv[1];
  const char* tmpdir = std::getenv("TMPDIR");
  g_tmpdir = (tmpdir ? std::string(tmpdir) : std::string("/tmp")) + "/caplab_cli_test";
  std::system(("mkdir -p " + g_tmpdir).c_str());
  doctest::Context ctx;
  ctx.applyCommandLine(argc - 1, argv + 1);
  return ctx.run();
}

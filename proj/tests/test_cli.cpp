#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef DAL_CLI_PATH
#error "DAL_CLI_PATH must name the command-line binary"
#endif

namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path root;
  explicit Scratch(const std::string& name) : root(fs::temp_directory_path() / ("dal_cli_" + name)) {
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Scratch() { fs::remove_all(root); }
  fs::path write(const std::string& file, const std::string& text) const {
    std::ofstream(root / file) << text;
    return root / file;
  }
};

int lab(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(DAL_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json summary(const fs::path& dir) { return nlohmann::json::parse(slurp(dir / "summary.json")); }

}  // namespace

TEST_CASE("run: iwasawa extinction and closed form") {
  Scratch s("iwasawa");
  const auto cfg = s.write("iw.ini", "[run]\nkind = iwasawa\nt_end = 2\n");
  REQUIRE(lab("run --config " + cfg.string() + " --out " + (s.root / "out").string(), s.root / "log") == 0);
  const auto j = summary(s.root / "out");
  CHECK(j["kind"] == "iwasawa");
  REQUIRE(!j["singularity"].is_null());
  const double t_star = j["singularity"]["t_star"];
  CHECK(t_star >= 0.99);
  CHECK(t_star <= 1.0);
  CHECK(j["closed_form_error"].get<double>() < 1e-7);
  for (const char* key : {"monotone_dual", "dilaton_bound", "conservation", "max_principle"}) CHECK(j["verdicts"].contains(key));
  CHECK(slurp(s.root / "out" / "trajectory.csv").rfind("t,dt,F_alpha[-1],F_alpha[0],F_alpha[1],min_dilaton,max_dilaton", 0) == 0);
}

TEST_CASE("run: identical seed gives byte-identical artifacts") {
  Scratch s("determinism");
  const auto cfg = s.write("p.ini", "seed = 5\n[run]\nkind = inverse_ma\ngrid = 32\nt_end = 0.5\n");
  REQUIRE(lab("run --config " + cfg.string() + " --out " + (s.root / "a").string(), s.root / "log") == 0);
  REQUIRE(lab("run --config " + cfg.string() + " --out " + (s.root / "b").string(), s.root / "log") == 0);
  REQUIRE(lab("run --config " + cfg.string() + " --seed 6 --out " + (s.root / "c").string(), s.root / "log") == 0);
  for (const char* f : {"trajectory.csv", "summary.json"}) {
    CHECK(slurp(s.root / "a" / f) == slurp(s.root / "b" / f));
    CHECK(slurp(s.root / "a" / f) != slurp(s.root / "c" / f));
  }
}

TEST_CASE("config errors and output collisions exit 2") {
  Scratch s("errors");
  const auto bad = s.write("bad.ini", "[run]\nkind = iwasawa\nt_end = 1\nspeed = 3\n");
  CHECK(lab("run --config " + bad.string() + " --out " + (s.root / "x").string(), s.root / "log") == 2);
  CHECK(slurp(s.root / "log").find("speed") != std::string::npos);
  CHECK_FALSE(fs::exists(s.root / "x"));

  const auto good = s.write("good.ini", "[run]\nkind = sl2c\nt_end = 3\n");
  REQUIRE(lab("run --config " + good.string() + " --out " + (s.root / "y").string(), s.root / "log") == 0);
  const auto before = slurp(s.root / "y" / "summary.json");
  CHECK(lab("run --config " + good.string() + " --out " + (s.root / "y").string(), s.root / "log") == 2);
  CHECK(slurp(s.root / "y" / "summary.json") == before);
  CHECK(lab("run --config " + good.string() + " --out " + (s.root / "y").string() + " --overwrite", s.root / "log") == 0);

  const auto empty = s.write("empty.ini", "[run]\nkind = product_fibration\nt_end = 1\n[sweep]\nparameter = grid\nvalues =\n");
  CHECK(lab("sweep --config " + empty.string() + " --out " + (s.root / "z").string(), s.root / "log") == 2);
  CHECK(lab("run --out " + (s.root / "w").string(), s.root / "log") == 2);
  CHECK(lab("frobnicate", s.root / "log") == 2);
}

TEST_CASE("verify-algebra: pass, report, and the sign-flip negative control") {
  Scratch s("algebra");
  const auto cfg = s.write("a.ini", "[algebra]\nn = 3, 4\nseeds = 10\n");
  REQUIRE(lab("verify-algebra --config " + cfg.string() + " --out " + (s.root / "ok").string(), s.root / "log") == 0);
  const auto report = slurp(s.root / "ok" / "algebra_report.csv");
  CHECK(report.rfind("identity,n,seeds,worst_seed,max_residual,verdict\n", 0) == 0);
  CHECK(report.find("quadratic_torsion_n3,3,10,") != std::string::npos);
  CHECK(report.find("quadratic_torsion_n3,4") == std::string::npos);
  CHECK(report.find("lambda_C,4,10,") != std::string::npos);
  CHECK(report.find("lambda_C,3") == std::string::npos);

  CHECK(lab("verify-algebra --config " + cfg.string() + " --inject-sign-flip star_B --out " + (s.root / "flip").string(), s.root / "log") == 1);
  CHECK(slurp(s.root / "log").find("star_B") != std::string::npos);
  const auto j = summary(s.root / "flip");
  CHECK(j["ok"] == false);
  CHECK(j["first_failure"].get<std::string>().find("star_B") != std::string::npos);
}

TEST_CASE("sweep: alpha values on the product flow and a grid convergence table") {
  Scratch s("sweep");
  const auto alpha = s.write("alpha.ini",
                             "[run]\nkind = product_fibration\ngrid = 16\nt_end = 2\n[sweep]\nparameter = alphas\nvalues = -2, 0, 1\n");
  REQUIRE(lab("sweep --config " + alpha.string() + " --out " + (s.root / "alpha").string(), s.root / "log") == 0);
  for (const char* run : {"run_000", "run_001", "run_002"}) {
    const auto j = summary(s.root / "alpha" / run);
    CHECK(j["verdicts"]["monotone_dual"] == "PASS");
    CHECK(j["details"]["monotone"][0]["in_hypothesis"] == true);
  }
  CHECK(fs::exists(s.root / "alpha" / "sweep_index.csv"));

  const auto grid = s.write("grid.ini", "[run]\nkind = inverse_ma\nt_end = 0.5\n[sweep]\nparameter = grid\nvalues = 16, 32, 64\n");
  REQUIRE(lab("sweep --config " + grid.string() + " --out " + (s.root / "grid").string(), s.root / "log") == 0);
  const auto table = slurp(s.root / "grid" / "convergence.csv");
  CHECK(table.rfind("grid,F_alpha[-1],delta[-1],order[-1]", 0) == 0);
  CHECK(std::count(table.begin(), table.end(), '\n') == 4);

  // Scheduling must not change any run's bytes.
  REQUIRE(lab("sweep --config " + grid.string() + " --out " + (s.root / "serial").string(), s.root / "log") == 0);
  setenv("DUAL_ANOMALY_LAB_THREADS", "1", 1);
  REQUIRE(lab("sweep --config " + grid.string() + " --out " + (s.root / "serial").string() + " --overwrite", s.root / "log") == 0);
  unsetenv("DUAL_ANOMALY_LAB_THREADS");
  for (const char* run : {"run_000", "run_001", "run_002"})
    CHECK(slurp(s.root / "grid" / run / "trajectory.csv") == slurp(s.root / "serial" / run / "trajectory.csv"));
  CHECK(slurp(s.root / "grid" / "sweep_index.csv") == slurp(s.root / "serial" / "sweep_index.csv"));
}

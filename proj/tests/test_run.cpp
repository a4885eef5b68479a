#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pxmp/errors.hpp"
#include "pxmp/run.hpp"

using namespace pxmp;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "pxmp_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("config file parsing with defaults and overrides") {
  const fs::path dir = fresh_dir("config");
  {
    std::ofstream out(dir / "run.cfg");
    out << "# comment line\n";
    out << "command = torsion\n";
    out << "mesh = interval:32\n";
    out << "lambda = 1\n";
  }
  RunConfig cfg = load_config((dir / "run.cfg").string());
  CHECK(cfg.command == RunConfig::Command::torsion);
  CHECK(cfg.mesh_spec == "interval:32");
  CHECK(cfg.lambda == 1.0);
  CHECK(cfg.tol == 1e-8);        // defaults survive
  CHECK(cfg.path_points == 41);
  validate_config(cfg);
}

TEST_CASE("config errors: unknown keys, bad values, bad invariants") {
  RunConfig cfg;
  CHECK_THROWS_AS(apply_key_value(cfg, "bogus", "1"), ConfigError);
  CHECK_THROWS_AS(apply_key_value(cfg, "tol", "fast"), ConfigError);
  CHECK_THROWS_AS(apply_key_value(cfg, "lambda_list", ""), ConfigError);

  apply_key_value(cfg, "lambda_list", "0.5, 0.2, 0.7");
  cfg.command = RunConfig::Command::sweep;
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);  // not decreasing

  RunConfig bad_mesh;
  bad_mesh.mesh_spec = "interval:1";
  CHECK_THROWS_AS(validate_config(bad_mesh), ConfigError);
  bad_mesh.mesh_spec = "cube:4";
  CHECK_THROWS_AS(validate_config(bad_mesh), ConfigError);

  RunConfig bad_p;
  bad_p.command = RunConfig::Command::verify;
  bad_p.p_expr = "2 + ";
  CHECK_THROWS_AS(validate_config(bad_p), ConfigError);
  try {
    validate_config(bad_p);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("byte") != std::string::npos);  // offset surfaces
  }

  RunConfig no_lambda;
  no_lambda.command = RunConfig::Command::solve;
  CHECK_THROWS_AS(validate_config(no_lambda), ConfigError);
}

TEST_CASE("torsion run writes the report and solution artifacts") {
  const fs::path dir = fresh_dir("torsion");
  RunConfig cfg;
  cfg.command = RunConfig::Command::torsion;
  cfg.mesh_spec = "interval:256";
  cfg.lambda = 1.0;
  cfg.out_dir = dir.string();
  CHECK(run(cfg) == kExitOk);

  const std::string report = slurp(dir / "report.csv");
  CHECK(report.find("min_u") != std::string::npos);
  CHECK(report.find("-0.125") != std::string::npos);

  const std::string solution = slurp(dir / "solution.csv");
  CHECK(count_lines(solution) == 258);  // header + 257 vertices
  CHECK(solution.substr(0, 4) == "x,u\n");
  CHECK(solution.find('\r') == std::string::npos);  // LF endings
}

TEST_CASE("solve run: artifacts, trace, gnuplot data") {
  const fs::path dir = fresh_dir("solve");
  RunConfig cfg;
  cfg.command = RunConfig::Command::solve;
  cfg.mesh_spec = "interval:64";
  cfg.lambda = 0.05;
  cfg.out_dir = dir.string();
  cfg.trace = true;
  cfg.emit_gnuplot = true;
  CHECK(run(cfg) == kExitOk);
  CHECK(count_lines(slurp(dir / "solution.csv")) == 66);
  CHECK(slurp(dir / "mpa_trace.csv").substr(0, 27) == "iter,point,energy,grad_dual");
  CHECK(fs::exists(dir / "solution.dat"));
}

TEST_CASE("solve run is deterministic byte-for-byte") {
  const fs::path d1 = fresh_dir("det1"), d2 = fresh_dir("det2");
  RunConfig cfg;
  cfg.command = RunConfig::Command::solve;
  cfg.mesh_spec = "interval:64";
  cfg.lambda = 0.1;
  cfg.trace = true;
  cfg.out_dir = d1.string();
  CHECK(run(cfg) == kExitOk);
  cfg.out_dir = d2.string();
  CHECK(run(cfg) == kExitOk);
  CHECK(slurp(d1 / "solution.csv") == slurp(d2 / "solution.csv"));
  CHECK(slurp(d1 / "report.csv") == slurp(d2 / "report.csv"));
  CHECK(slurp(d1 / "mpa_trace.csv") == slurp(d2 / "mpa_trace.csv"));
}

TEST_CASE("sweep run writes rows and the threshold") {
  const fs::path dir = fresh_dir("sweep");
  RunConfig cfg;
  cfg.command = RunConfig::Command::sweep;
  cfg.mesh_spec = "interval:64";
  cfg.lambda_list = {0.1, 0.05};
  cfg.out_dir = dir.string();
  CHECK(run(cfg) == kExitOk);
  const std::string sweep = slurp(dir / "sweep.csv");
  CHECK(count_lines(sweep) == 3);
  CHECK(slurp(dir / "report.csv").find("lambda_threshold") != std::string::npos);
  CHECK(slurp(dir / "report.csv").find("0.1") != std::string::npos);
}

TEST_CASE("norm run reports the measured norms") {
  const fs::path dir = fresh_dir("norm");
  RunConfig cfg;
  cfg.command = RunConfig::Command::norm;
  cfg.mesh_spec = "interval:64";
  cfg.p_expr = "2";
  cfg.u_expr = "x*(1-x)";
  cfg.out_dir = dir.string();
  CHECK(run(cfg) == kExitOk);
  const std::string report = slurp(dir / "report.csv");
  CHECK(report.find("modular,luxemburg_norm,sobolev_norm") != std::string::npos);
}

TEST_CASE("verify run exits clean and writes the suite table") {
  const fs::path dir = fresh_dir("verify");
  RunConfig cfg;
  cfg.command = RunConfig::Command::verify;
  cfg.seed = 7;
  cfg.trials = 60;  // small but representative; the acceptance suite runs 500
  cfg.out_dir = dir.string();
  CHECK(run(cfg) == kExitOk);
  const std::string table = slurp(dir / "verify.csv");
  CHECK(table.find("norm_modular,sandwich") != std::string::npos);
  CHECK(table.find("holder,c_equals_2") != std::string::npos);
}

TEST_CASE("format_g17 round-trips doubles losslessly") {
  for (double v : {0.1, 1.0 / 3.0, -0.125, 3.141592653589793, 1e-300}) {
    CHECK(std::stod(format_g17(v)) == v);
  }
}

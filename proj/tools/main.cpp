// pxmp command-line driver: positive solutions of semipositone p(x)-Laplacian
// problems by a numerical mountain-pass method, plus the supporting
// variable-exponent norm machinery and randomized verification suites.

#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "pxmp/errors.hpp"
#include "pxmp/run.hpp"

namespace {

// Returns the --config path, if present, before CLI11 runs: file values act
// as defaults that explicit flags then override.
std::string find_config_path(int argc, char** argv) {
  for (int i = 1; i < argc - 1; ++i) {
    if (std::string(argv[i]) == "--config") return argv[i + 1];
  }
  return {};
}

void add_common_options(CLI::App* cmd, pxmp::RunConfig& cfg) {
  cmd->add_option("--mesh", cfg.mesh_spec, "Mesh: interval:<n> or square:<n>");
  cmd->add_option("--p", cfg.p_expr, "Variable exponent p(x[,y]) as an expression");
  cmd->add_option("--tol", cfg.tol, "Residual tolerance (dual norm)");
  cmd->add_option("--out", cfg.out_dir, "Output directory for CSV artifacts");
  cmd->add_option("--seed", cfg.seed, "Seed for randomized suites");
  std::string ignored;
  cmd->add_option("--config", ignored, "key = value config file (flags override it)");
}

void add_problem_options(CLI::App* cmd, pxmp::RunConfig& cfg) {
  cmd->add_option("--f", cfg.f_expr, "Nonlinearity f(t); omit for the power model t^(q-1)");
  cmd->add_option("--q", cfg.q, "Growth exponent q");
  cmd->add_option("--r", cfg.r, "Near-origin exponent r");
  cmd->add_option("--theta", cfg.theta, "Superlinearity constant theta");
  cmd->add_option("--t0", cfg.t0, "Superlinearity onset t0");
  cmd->add_option("--path-points", cfg.path_points, "Points on the discretized path");
  cmd->add_flag("--trace", cfg.trace, "Dump per-iteration trace to mpa_trace.csv");
  cmd->add_flag("--emit-gnuplot", cfg.emit_gnuplot, "Also write whitespace-separated .dat files");
}

}  // namespace

int main(int argc, char** argv) {
  pxmp::RunConfig cfg;
  const std::string config_path = find_config_path(argc, argv);
  if (!config_path.empty()) {
    try {
      cfg = pxmp::load_config(config_path);
    } catch (const pxmp::ConfigError& e) {
      std::cerr << e.what() << '\n';
      return pxmp::kExitConfig;
    }
  }

  CLI::App app{"Semipositone p(x)-Laplacian solver and variable-exponent toolbox"};
  app.require_subcommand(0, 1);

  CLI::App* norm = app.add_subcommand("norm", "Modular / Luxemburg / Sobolev norms of a function");
  add_common_options(norm, cfg);
  norm->add_option("--u", cfg.u_expr, "Function u(x[,y]) to measure");

  CLI::App* torsion = app.add_subcommand("torsion", "Constant-load comparison problem");
  add_common_options(torsion, cfg);
  double lambda_torsion = 0.0;
  CLI::Option* lt = torsion->add_option("--lambda", lambda_torsion, "Load constant lambda");

  CLI::App* solve = app.add_subcommand("solve", "Mountain-pass critical point for one lambda");
  add_common_options(solve, cfg);
  add_problem_options(solve, cfg);
  double lambda_solve = 0.0;
  CLI::Option* ls = solve->add_option("--lambda", lambda_solve, "Shift lambda");

  CLI::App* sweep = app.add_subcommand("sweep", "Decreasing-lambda sweep for the positivity threshold");
  add_common_options(sweep, cfg);
  add_problem_options(sweep, cfg);
  std::vector<double> lambda_list;
  CLI::Option* ll =
      sweep->add_option("--lambda-list", lambda_list, "Strictly decreasing lambda values")
          ->delimiter(',');
  sweep->add_flag("--no-warm-start", cfg.no_warm_start, "Solve every row from scratch");
  sweep->add_flag("--parallel", cfg.parallel, "Row-parallel sweep (needs --no-warm-start)");

  CLI::App* verify = app.add_subcommand("verify", "Randomized function-space property suites");
  add_common_options(verify, cfg);
  verify->add_option("--trials", cfg.trials, "Number of random draws");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pxmp::kExitConfig;
  }

  if (norm->parsed()) cfg.command = pxmp::RunConfig::Command::norm;
  if (torsion->parsed()) cfg.command = pxmp::RunConfig::Command::torsion;
  if (solve->parsed()) cfg.command = pxmp::RunConfig::Command::solve;
  if (sweep->parsed()) cfg.command = pxmp::RunConfig::Command::sweep;
  if (verify->parsed()) cfg.command = pxmp::RunConfig::Command::verify;
  if (app.get_subcommands().empty() && config_path.empty()) {
    std::cerr << app.help();
    return pxmp::kExitConfig;
  }
  if (lt->count() > 0) cfg.lambda = lambda_torsion;
  if (ls->count() > 0) cfg.lambda = lambda_solve;
  if (ll->count() > 0) cfg.lambda_list = lambda_list;

  try {
    return pxmp::run(cfg);
  } catch (const pxmp::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return pxmp::kExitConfig;
  } catch (const pxmp::Error& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
}

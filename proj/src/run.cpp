#include "pxmp/run.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pxmp/errors.hpp"
#include "pxmp/property_suite.hpp"
#include "pxmp/solvers.hpp"
#include "pxmp/varexp.hpp"

namespace pxmp {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (trim(value.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(key, "not a number: '" + value + "'");
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(value, &used);
    if (trim(value.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(key, "not an integer: '" + value + "'");
}

bool parse_bool(const std::string& key, const std::string& value) {
  std::string v = value;
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw ConfigError(key, "not a boolean: '" + value + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(key, item));
  }
  if (out.empty()) throw ConfigError(key, "empty list");
  return out;
}

RunConfig::Command parse_command(const std::string& value) {
  if (value == "norm") return RunConfig::Command::norm;
  if (value == "torsion") return RunConfig::Command::torsion;
  if (value == "solve") return RunConfig::Command::solve;
  if (value == "sweep") return RunConfig::Command::sweep;
  if (value == "verify") return RunConfig::Command::verify;
  throw ConfigError("command", "unknown command '" + value + "'");
}

std::string command_name(RunConfig::Command c) {
  switch (c) {
    case RunConfig::Command::norm:
      return "norm";
    case RunConfig::Command::torsion:
      return "torsion";
    case RunConfig::Command::solve:
      return "solve";
    case RunConfig::Command::sweep:
      return "sweep";
    case RunConfig::Command::verify:
      return "verify";
  }
  return "?";
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // LF endings everywhere
  if (!out) throw ConfigError("out", "cannot open '" + path.string() + "' for writing");
  return out;
}

Expr parse_field(const std::string& key, const std::string& text) {
  try {
    return Expr::parse(text);
  } catch (const Error& e) {
    throw ConfigError(key, e.what());
  }
}

Expr parse_nonlinearity_expr(const std::string& text) {
  static constexpr std::string_view kT[] = {"t"};
  try {
    return Expr::parse(text, kT);
  } catch (const Error& e) {
    throw ConfigError("f", e.what());
  }
}

Nonlinearity make_nonlinearity(const RunConfig& cfg) {
  if (cfg.f_expr.empty()) return Nonlinearity::power_model(cfg.q, cfg.r, cfg.theta, cfg.t0);
  return Nonlinearity::from_expression(parse_nonlinearity_expr(cfg.f_expr), cfg.q, cfg.r,
                                       cfg.theta, cfg.t0);
}

void write_solution_outputs(const RunConfig& cfg, const FeFunction& u) {
  const std::filesystem::path dir(cfg.out_dir);
  write_function_csv((dir / "solution.csv").string(), u);
  if (cfg.emit_gnuplot) {
    std::ofstream out = open_out(dir / "solution.dat");
    const Mesh& m = *u.mesh;
    for (int i = 0; i < m.vertex_count(); ++i) {
      out << format_g17(m.vertices()[i].x());
      if (m.dim() == 2) out << ' ' << format_g17(m.vertices()[i].y());
      out << ' ' << format_g17(u.nodal[i]) << '\n';
    }
  }
}

void write_report_csv(const RunConfig& cfg, const SolveReport& rep) {
  std::ofstream out = open_out(std::filesystem::path(cfg.out_dir) / "report.csv");
  out << "command,mesh,p,lambda,energy,residual_dual_norm,min_u,negative_measure,iterations,"
         "converged\n";
  out << command_name(cfg.command) << ',' << cfg.mesh_spec << ',' << cfg.p_expr << ','
      << format_g17(cfg.lambda.value_or(0.0)) << ',' << format_g17(rep.energy) << ','
      << format_g17(rep.residual_dual_norm) << ',' << format_g17(rep.min_u) << ','
      << format_g17(rep.negative_measure) << ',' << rep.iterations << ','
      << (rep.converged ? 1 : 0) << '\n';
}

int run_torsion(const RunConfig& cfg) {
  const Mesh mesh = make_mesh(cfg.mesh_spec);
  const ExponentField p = ExponentField::from_expression(mesh, parse_field("p", cfg.p_expr));
  try {
    const SolveReport rep = solve_torsion(p, cfg.lambda.value(), mesh, cfg.tol);
    write_report_csv(cfg, rep);
    write_solution_outputs(cfg, rep.u);
    return kExitOk;
  } catch (const NoConvergence& e) {
    std::cerr << "torsion: " << e.what() << '\n';
    return kExitNoConvergence;
  }
}

int run_solve(const RunConfig& cfg) {
  const Mesh mesh = make_mesh(cfg.mesh_spec);
  const ExponentField p = ExponentField::from_expression(mesh, parse_field("p", cfg.p_expr));
  const TruncatedProblem prob{make_nonlinearity(cfg), cfg.lambda.value()};
  MountainPassOptions opts;
  opts.tol = cfg.tol;
  opts.path_points = cfg.path_points;
  try {
    auto [rep, state] = mountain_pass(p, prob, mesh, opts);
    write_report_csv(cfg, rep);
    write_solution_outputs(cfg, rep.u);
    if (cfg.trace) {
      std::ofstream out = open_out(std::filesystem::path(cfg.out_dir) / "mpa_trace.csv");
      out << "iter,point,energy,grad_dual\n";
      for (const auto& row : state.history) {
        out << row.iteration << ',' << row.point << ',' << format_g17(row.energy) << ','
            << format_g17(row.grad_dual_norm) << '\n';
      }
    }
    return kExitOk;
  } catch (const NoConvergence& e) {
    std::cerr << "solve: " << e.what() << '\n';
    return kExitNoConvergence;
  } catch (const NoDescent& e) {
    std::cerr << "solve: " << e.what() << '\n';
    return kExitNoConvergence;
  } catch (const CollapsedPath& e) {
    std::cerr << "solve: " << e.what() << '\n';
    return kExitNoConvergence;
  }
}

int run_sweep(const RunConfig& cfg) {
  const Mesh mesh = make_mesh(cfg.mesh_spec);
  const ExponentField p = ExponentField::from_expression(mesh, parse_field("p", cfg.p_expr));
  SweepOptions opts;
  opts.mpa.tol = cfg.tol;
  opts.mpa.path_points = cfg.path_points;
  opts.warm_start = !cfg.no_warm_start;
  opts.parallel = cfg.parallel;
  const SweepResult result = lambda_sweep(p, make_nonlinearity(cfg), mesh, cfg.lambda_list, opts);

  const std::filesystem::path dir(cfg.out_dir);
  {
    std::ofstream out = open_out(dir / "sweep.csv");
    out << "lambda,energy,min_u,negative_measure,residual,iterations,converged\n";
    for (const auto& row : result.rows) {
      out << format_g17(row.lambda) << ',' << format_g17(row.energy) << ','
          << format_g17(row.min_u) << ',' << format_g17(row.negative_measure) << ','
          << format_g17(row.residual) << ',' << row.iterations << ',' << (row.converged ? 1 : 0)
          << '\n';
    }
  }
  {
    std::ofstream out = open_out(dir / "report.csv");
    out << "command,mesh,p,rows,converged_rows,lambda_threshold\n";
    int converged = 0;
    for (const auto& row : result.rows) converged += row.converged ? 1 : 0;
    out << "sweep," << cfg.mesh_spec << ',' << cfg.p_expr << ',' << result.rows.size() << ','
        << converged << ','
        << (result.lambda_threshold ? format_g17(*result.lambda_threshold) : std::string("none"))
        << '\n';
  }
  for (const auto& row : result.rows) {
    if (!row.converged) return kExitNoConvergence;
  }
  return kExitOk;
}

int run_norm(const RunConfig& cfg) {
  const Mesh mesh = make_mesh(cfg.mesh_spec);
  const ExponentField p = ExponentField::from_expression(mesh, parse_field("p", cfg.p_expr));
  const FeFunction u = FeFunction::sample(mesh, parse_field("u", cfg.u_expr));
  const double rho = modular(u, p);
  const double lux = luxemburg_norm(u, p);
  const bool zero_trace = u.zero_trace(1e-14);
  const double sob = zero_trace ? sobolev_norm(u, p) : std::nan("");

  std::ofstream out = open_out(std::filesystem::path(cfg.out_dir) / "report.csv");
  out << "command,mesh,p,u,modular,luxemburg_norm,sobolev_norm,l1_norm\n";
  out << "norm," << cfg.mesh_spec << ',' << cfg.p_expr << ',' << cfg.u_expr << ','
      << format_g17(rho) << ',' << format_g17(lux) << ',' << format_g17(sob) << ','
      << format_g17(l1_norm(u)) << '\n';
  return kExitOk;
}

int run_verify(const RunConfig& cfg) {
  const Mesh interval = Mesh::interval(64);
  const Mesh square = Mesh::unit_square(16);
  const int half = std::max(1, cfg.trials / 2);

  std::vector<std::pair<std::string, PropertyCheck>> rows;
  for (const auto& check : run_function_space_suite(interval, half, cfg.seed)) {
    rows.emplace_back("interval:64", check);
  }
  for (const auto& check : run_function_space_suite(square, cfg.trials - half, cfg.seed + 1)) {
    rows.emplace_back("square:16", check);
  }

  std::ofstream out = open_out(std::filesystem::path(cfg.out_dir) / "verify.csv");
  out << "suite,check,mesh,draws,failures,worst_slack,pass\n";
  bool all_pass = true;
  for (const auto& [mesh_name, check] : rows) {
    out << check.suite << ',' << check.check << ',' << mesh_name << ',' << check.draws << ','
        << check.failures << ',' << format_g17(check.worst_slack) << ',' << (check.pass() ? 1 : 0)
        << '\n';
    all_pass = all_pass && check.pass();
  }
  return all_pass ? kExitOk : kExitPropertyFailure;
}

}  // namespace

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_function_csv(const std::string& path, const FeFunction& u) {
  std::ofstream out = open_out(path);
  const Mesh& m = *u.mesh;
  out << (m.dim() == 1 ? "x,u" : "x,y,u") << '\n';
  for (int i = 0; i < m.vertex_count(); ++i) {
    out << format_g17(m.vertices()[i].x());
    if (m.dim() == 2) out << ',' << format_g17(m.vertices()[i].y());
    out << ',' << format_g17(u.nodal[i]) << '\n';
  }
}

Mesh make_mesh(const std::string& mesh_spec) {
  const auto colon = mesh_spec.find(':');
  if (colon != std::string::npos) {
    const std::string kind = mesh_spec.substr(0, colon);
    const std::string size = mesh_spec.substr(colon + 1);
    try {
      const int n = parse_int("mesh", size);
      if (kind == "interval") return Mesh::interval(n);
      if (kind == "square") return Mesh::unit_square(n);
    } catch (const InvalidSize& e) {
      throw ConfigError("mesh", e.what());
    }
  }
  throw ConfigError("mesh", "expected interval:<n> or square:<n>, got '" + mesh_spec + "'");
}

void apply_key_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "command") {
    cfg.command = parse_command(value);
  } else if (key == "mesh") {
    cfg.mesh_spec = value;
  } else if (key == "p") {
    cfg.p_expr = value;
  } else if (key == "f") {
    cfg.f_expr = value;
  } else if (key == "u") {
    cfg.u_expr = value;
  } else if (key == "q") {
    cfg.q = parse_double(key, value);
  } else if (key == "r") {
    cfg.r = parse_double(key, value);
  } else if (key == "theta") {
    cfg.theta = parse_double(key, value);
  } else if (key == "t0") {
    cfg.t0 = parse_double(key, value);
  } else if (key == "lambda") {
    cfg.lambda = parse_double(key, value);
  } else if (key == "lambda_list") {
    cfg.lambda_list = parse_list(key, value);
  } else if (key == "tol") {
    cfg.tol = parse_double(key, value);
  } else if (key == "path_points") {
    cfg.path_points = parse_int(key, value);
  } else if (key == "out") {
    cfg.out_dir = value;
  } else if (key == "seed") {
    cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
  } else if (key == "trials") {
    cfg.trials = parse_int(key, value);
  } else if (key == "trace") {
    cfg.trace = parse_bool(key, value);
  } else if (key == "emit_gnuplot") {
    cfg.emit_gnuplot = parse_bool(key, value);
  } else if (key == "no_warm_start") {
    cfg.no_warm_start = parse_bool(key, value);
  } else if (key == "parallel") {
    cfg.parallel = parse_bool(key, value);
  } else {
    throw ConfigError(key, "unknown key");
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read '" + path + "'");
  RunConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line.substr(0, line.find('#')));
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config", "line " + std::to_string(line_no) + " is not key = value");
    }
    apply_key_value(cfg, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
  }
  return cfg;
}

void validate_config(const RunConfig& cfg) {
  make_mesh(cfg.mesh_spec);  // validates kind and n >= 2
  parse_field("p", cfg.p_expr);
  if (!cfg.f_expr.empty()) parse_nonlinearity_expr(cfg.f_expr);
  if (!(cfg.tol > 0.0)) throw ConfigError("tol", "must be positive");
  if (cfg.path_points < 3) throw ConfigError("path_points", "must be at least 3");
  if (!(cfg.q > 1.0)) throw ConfigError("q", "must exceed 1");
  if (!(cfg.r > 1.0)) throw ConfigError("r", "must exceed 1");
  if (!(cfg.theta > 1.0)) throw ConfigError("theta", "must exceed 1");
  if (!(cfg.t0 > 0.0)) throw ConfigError("t0", "must be positive");
  if (cfg.trials < 1) throw ConfigError("trials", "must be positive");
  for (std::size_t i = 0; i < cfg.lambda_list.size(); ++i) {
    if (!(cfg.lambda_list[i] > 0.0)) throw ConfigError("lambda_list", "values must be positive");
    if (i > 0 && !(cfg.lambda_list[i] < cfg.lambda_list[i - 1])) {
      throw ConfigError("lambda_list", "must be strictly decreasing");
    }
  }
  switch (cfg.command) {
    case RunConfig::Command::torsion:
      if (!cfg.lambda) throw ConfigError("lambda", "required by the torsion command");
      if (*cfg.lambda < 0.0) throw ConfigError("lambda", "must be nonnegative");
      break;
    case RunConfig::Command::solve:
      if (!cfg.lambda) throw ConfigError("lambda", "required by the solve command");
      break;
    case RunConfig::Command::sweep:
      if (cfg.lambda_list.empty()) throw ConfigError("lambda_list", "required by the sweep command");
      break;
    case RunConfig::Command::norm:
      if (cfg.u_expr.empty()) throw ConfigError("u", "required by the norm command");
      parse_field("u", cfg.u_expr);
      break;
    case RunConfig::Command::verify:
      break;
  }
}

int run(const RunConfig& cfg) {
  validate_config(cfg);
  std::filesystem::create_directories(cfg.out_dir);
  switch (cfg.command) {
    case RunConfig::Command::norm:
      return run_norm(cfg);
    case RunConfig::Command::torsion:
      return run_torsion(cfg);
    case RunConfig::Command::solve:
      return run_solve(cfg);
    case RunConfig::Command::sweep:
      return run_sweep(cfg);
    case RunConfig::Command::verify:
      return run_verify(cfg);
  }
  throw ConfigError("command", "unhandled command");
}

}  // namespace pxmp

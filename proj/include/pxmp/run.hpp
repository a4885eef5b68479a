#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pxmp/mesh.hpp"

namespace pxmp {

/// Everything a batch run needs. Flags override config-file values; the
/// file format is flat `key = value` lines with '#' comments.
struct RunConfig {
  enum class Command { norm, torsion, solve, sweep, verify };
  Command command = Command::solve;
  std::string mesh_spec = "interval:64";  // interval:<n> | square:<n>
  std::string p_expr = "2";
  std::string f_expr;  // empty selects the power model f(t) = t^{q-1}
  std::string u_expr;  // target function of the `norm` command
  double q = 4.0;
  double r = 3.5;
  double theta = 3.5;
  double t0 = 1.0;
  std::optional<double> lambda;
  std::vector<double> lambda_list;  // strictly decreasing, positive
  double tol = 1e-8;
  int path_points = 41;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int trials = 500;  // randomized suite draws (verify)
  bool trace = false;
  bool emit_gnuplot = false;
  bool no_warm_start = false;
  bool parallel = false;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNoConvergence = 3;
inline constexpr int kExitPropertyFailure = 4;

/// Apply one `key = value` pair; throws ConfigError for unknown keys or
/// unparseable values.
void apply_key_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// Load a flat key = value config file on top of the defaults.
RunConfig load_config(const std::string& path);

/// Full validation (invariants and per-command requirements); throws ConfigError.
void validate_config(const RunConfig& cfg);

/// Execute the configured command, writing CSV artifacts under out_dir.
/// Returns 0 on success, 3 when a solve fails to converge, 4 when a property
/// suite fails; throws ConfigError (exit 2 at the CLI) for bad configs.
int run(const RunConfig& cfg);

/// Lossless decimal formatting used by every CSV artifact.
std::string format_g17(double v);

/// Vertex table `x[,y],u` with 17 significant digits, LF line endings.
void write_function_csv(const std::string& path, const FeFunction& u);

Mesh make_mesh(const std::string& mesh_spec);

}  // namespace pxmp

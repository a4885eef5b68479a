#pragma once

#include <Eigen/SparseCholesky>
#include <optional>
#include <utility>
#include <vector>

#include "pxmp/assembly.hpp"

namespace pxmp {

/// Fixed Riesz map: the p == 2 Dirichlet stiffness matrix on the free nodes,
/// factorized once. It defines the dual norm sqrt(r^T K^{-1} r) used as the
/// stopping metric for E', the descent preconditioner, and the path metric.
class RieszMap {
 public:
  explicit RieszMap(const Mesh& m);
  const Eigen::SparseMatrix<double>& matrix() const { return K_; }
  Eigen::VectorXd solve(const Eigen::VectorXd& r) const;
  double dual_norm(const Eigen::VectorXd& r) const;
  double norm(const Eigen::VectorXd& d) const;

 private:
  Eigen::SparseMatrix<double> K_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

struct SolveReport {
  FeFunction u;
  double energy = 0.0;
  double residual_dual_norm = 0.0;
  double min_u = 0.0;             // minimum over interior nodes
  double negative_measure = 0.0;  // quadrature measure of {u <= 0}
  int iterations = 0;
  bool converged = false;
};

/// Minimize the strictly convex J(v) = integral |grad v|^p/p + lambda v over
/// zero-trace functions by damped Newton from the p == 2 warm start.
/// The minimizer is the nonpositive comparison solution of the constant-load
/// problem. Throws NoConvergence after 200 Newton steps.
SolveReport solve_torsion(const ExponentField& p, double lambda, const Mesh& mesh,
                          double tol = 1e-8);

/// Positive eigenfunction surrogate (product of sines on the built-in
/// meshes), normalized to sobolev_norm == 1 for the given exponent.
FeFunction positive_seed(const Mesh& mesh, const ExponentField& p);

/// Double t from 1 until E(t phi) < 0; returns (t1, t1 phi). Requires phi
/// positive inside, zero trace, unit Sobolev norm. Throws NoDescent if the
/// energy stays nonnegative up to t = 2^60.
std::pair<double, FeFunction> find_descent_endpoint(const ExponentField& p,
                                                    const TruncatedProblem& prob,
                                                    const FeFunction& phi);

struct MountainPassOptions {
  int path_points = 41;
  double tol = 1e-8;        // final residual dual norm
  double tol_path = 1e-3;   // path-max dual norm that hands off to Newton
  int max_iterations = 50000;
  int max_newton_iterations = 200;
  double hessian_eps = 1e-10;
  bool keep_history = true;
};

struct MpaHistoryRow {
  int iteration = 0;
  int point = 0;  // path index of the max; -1 during Newton refinement
  double energy = 0.0;
  double grad_dual_norm = 0.0;
  double sobolev_norm = 0.0;
};

struct MountainPassState {
  std::vector<FeFunction> path;  // gamma(0) = 0 fixed, E(gamma(1)) < 0
  std::vector<double> energies;
  int max_index = 0;
  double grad_dual_norm = 0.0;
  int iterations = 0;
  double t1 = 0.0;                  // descent endpoint scale
  double initial_max_energy = 0.0;  // max energy of the initial path
  double energy_upper_bound = 0.0;  // t1^{p+}/p- + t1 lambda ||phi||_1
  std::vector<MpaHistoryRow> history;
};

/// Min-max critical point between 0 and the descent endpoint: deform the
/// discretized path by preconditioned descent at its energy maximum until the
/// dual residual there drops below tol_path, then Newton-refine to tol.
/// Throws CollapsedPath when the path maximum reaches an endpoint or falls
/// below zero (mountain geometry lost), NoConvergence on iteration caps.
std::pair<SolveReport, MountainPassState> mountain_pass(const ExponentField& p,
                                                        const TruncatedProblem& prob,
                                                        const Mesh& mesh,
                                                        const MountainPassOptions& opts = {});

/// Compactness diagnostics of a finished run: the (E, ||E'||_dual, ||u||_{1,p})
/// sequence along the iteration with its extreme values.
struct PalaisSmaleReport {
  std::vector<MpaHistoryRow> rows;
  double max_sobolev_norm = 0.0;
  double final_grad_dual_norm = 0.0;
  double min_energy = 0.0;  // over rows after the first
  double max_energy = 0.0;
};
PalaisSmaleReport palais_smale_monitor(const MountainPassState& state);

/// Numerical check of the comparison principle for the pair (lower, upper):
/// hypothesis: principal action of `lower` <= action of `upper` against every
/// nonnegative hat function; conclusion: lower <= upper nodewise.
struct ComparisonReport {
  double hypothesis_violation = 0.0;  // max_i a(lower)_i - a(upper)_i
  double conclusion_violation = 0.0;  // max_i lower_i - upper_i
  bool hypothesis_ok = false;
  bool conclusion_ok = false;
};
ComparisonReport verify_comparison(const FeFunction& lower, const FeFunction& upper,
                                   const ExponentField& p, const Mesh& mesh, double tol = 1e-10);

/// Inward one-sided difference quotients (u[interior neighbor] - u[b])/dist
/// at every boundary node; a strictly positive minimum is the Hopf-type pass.
struct BoundarySlopeReport {
  double min_inward_slope = 0.0;
  bool degenerate = false;  // u == 0, all slopes vanish
  int nodes_checked = 0;
};
BoundarySlopeReport boundary_slope_check(const FeFunction& u, const Mesh& mesh);

struct SweepOptions {
  MountainPassOptions mpa;
  bool warm_start = true;      // Newton continuation from the previous row
  bool parallel = false;       // row-parallel; only honored with warm_start off
  bool keep_solutions = false; // retain every row's solution in the result
};

struct SweepRow {
  double lambda = 0.0;
  double energy = 0.0;
  double min_u = 0.0;
  double negative_measure = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // lambda strictly decreasing down the rows
  /// Largest listed lambda such that every row at or below it converged with
  /// min_u > 0; empty if none qualifies.
  std::optional<double> lambda_threshold;
  /// Per-row solutions when SweepOptions::keep_solutions is set (rows that
  /// failed to converge hold an empty function).
  std::vector<FeFunction> solutions;
};

/// Run mountain_pass for each lambda of the strictly decreasing list,
/// warm-starting from the previous solution. Non-converged rows are flagged
/// and the sweep continues.
SweepResult lambda_sweep(const ExponentField& p, const Nonlinearity& base, const Mesh& mesh,
                         const std::vector<double>& lambdas, const SweepOptions& opts = {});

}  // namespace pxmp

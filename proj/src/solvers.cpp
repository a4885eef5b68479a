#include "pxmp/solvers.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "pxmp/errors.hpp"
#include "pxmp/varexp.hpp"

namespace pxmp {

namespace {

constexpr double kArmijoC = 1e-4;
constexpr int kArmijoMaxTrials = 40;

FeFunction scaled(const FeFunction& u, double t) {
  return {u.mesh, t * u.nodal};
}

FeFunction with_free(const Mesh& mesh, const Eigen::VectorXd& free_values) {
  FeFunction u = FeFunction::zero(mesh);
  u.set_free_values(free_values);
  return u;
}

// Damped Newton on E'(u) = 0 with the merit 1/2 ||E'||_dual^2, falling back
// to a preconditioned descent step when the Newton direction stalls.
struct NewtonOutcome {
  FeFunction u;
  double residual = 0.0;
  double energy = 0.0;
  int iterations = 0;
  bool converged = false;
};

NewtonOutcome newton_refine(FeFunction u, const ExponentField& p, const TruncatedProblem& prob,
                            const RieszMap& riesz, double tol, int max_iterations, double eps) {
  NewtonOutcome out{std::move(u)};
  AssemblyResult asm_now = assemble_gradient(out.u, p, prob);
  double gd = riesz.dual_norm(asm_now.gradient);

  for (int it = 0; it < max_iterations; ++it) {
    if (gd <= tol) {
      out.converged = true;
      break;
    }
    AssemblyResult sys = assemble_hessian(out.u, p, prob, eps);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(*sys.hessian);
    Eigen::VectorXd step;
    if (lu.info() == Eigen::Success) {
      step = lu.solve(-sys.gradient);
    }
    if (lu.info() != Eigen::Success || !step.allFinite()) {
      // singular Hessian: retry with a stiffness shift
      Eigen::SparseMatrix<double> shifted = *sys.hessian + 1e-8 * riesz.matrix();
      lu.compute(shifted);
      if (lu.info() != Eigen::Success) {
        step = -riesz.solve(sys.gradient);
      } else {
        step = lu.solve(-sys.gradient);
      }
    }

    const double merit0 = 0.5 * gd * gd;
    const Eigen::VectorXd free0 = out.u.free_values();
    double alpha = 1.0;
    bool accepted = false;
    FeFunction trial = out.u;
    for (int ls = 0; ls < kArmijoMaxTrials; ++ls, alpha *= 0.5) {
      trial.set_free_values(free0 + alpha * step);
      AssemblyResult asm_trial = assemble_gradient(trial, p, prob);
      const double gd_trial = riesz.dual_norm(asm_trial.gradient);
      if (0.5 * gd_trial * gd_trial <= (1.0 - 2.0 * kArmijoC * alpha) * merit0) {
        out.u = trial;
        asm_now = std::move(asm_trial);
        gd = gd_trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // steepest direction in the Riesz metric as a last resort
      const Eigen::VectorXd d = -riesz.solve(asm_now.gradient);
      alpha = 1.0;
      for (int ls = 0; ls < kArmijoMaxTrials; ++ls, alpha *= 0.5) {
        trial.set_free_values(free0 + alpha * d);
        AssemblyResult asm_trial = assemble_gradient(trial, p, prob);
        const double gd_trial = riesz.dual_norm(asm_trial.gradient);
        if (0.5 * gd_trial * gd_trial <= (1.0 - 2.0 * kArmijoC * alpha) * merit0) {
          out.u = trial;
          asm_now = std::move(asm_trial);
          gd = gd_trial;
          accepted = true;
          break;
        }
      }
    }
    ++out.iterations;
    if (!accepted) break;  // stationary for the merit; residual check decides
  }
  out.residual = gd;
  out.converged = gd <= tol;
  out.energy = asm_now.energy;
  return out;
}

}  // namespace

RieszMap::RieszMap(const Mesh& m) : K_(assemble_stiffness(m)) {
  ldlt_.compute(K_);
  if (ldlt_.info() != Eigen::Success) {
    throw NoConvergence("stiffness factorization failed", 0);
  }
}

Eigen::VectorXd RieszMap::solve(const Eigen::VectorXd& r) const { return ldlt_.solve(r); }

double RieszMap::dual_norm(const Eigen::VectorXd& r) const {
  return std::sqrt(std::max(0.0, r.dot(ldlt_.solve(r))));
}

double RieszMap::norm(const Eigen::VectorXd& d) const {
  return std::sqrt(std::max(0.0, d.dot(K_ * d)));
}

SolveReport solve_torsion(const ExponentField& p, double lambda, const Mesh& mesh, double tol) {
  if (lambda < 0.0) throw std::invalid_argument("solve_torsion needs lambda >= 0");
  RieszMap riesz(mesh);

  // warm start: the p == 2 solution K v = -lambda m (exact for p == 2)
  FeFunction v = with_free(mesh, riesz.solve(-lambda * assemble_load(mesh)));
  AssemblyResult asm_now = torsion_gradient(v, p, lambda);
  double gd = riesz.dual_norm(asm_now.gradient);

  int it = 0;
  const int max_it = 200;
  while (gd > tol) {
    if (it >= max_it) throw NoConvergence("torsion Newton stalled", it);
    AssemblyResult sys = torsion_hessian(v, p, lambda);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(*sys.hessian);
    Eigen::VectorXd step;
    if (ldlt.info() == Eigen::Success) {
      step = ldlt.solve(-sys.gradient);
    } else {
      Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(*sys.hessian);
      if (lu.info() != Eigen::Success) throw NoConvergence("torsion Hessian factorization", it);
      step = lu.solve(-sys.gradient);
    }
    // Armijo on the convex energy
    const double j0 = asm_now.energy;
    const double slope = asm_now.gradient.dot(step);
    const Eigen::VectorXd free0 = v.free_values();
    double alpha = 1.0;
    bool accepted = false;
    FeFunction trial = v;
    for (int ls = 0; ls < kArmijoMaxTrials; ++ls, alpha *= 0.5) {
      trial.set_free_values(free0 + alpha * step);
      const double j_trial = torsion_energy(trial, p, lambda);
      if (j_trial <= j0 + kArmijoC * alpha * slope) {
        v = trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) throw NoConvergence("torsion line search failed", it);
    asm_now = torsion_gradient(v, p, lambda);
    gd = riesz.dual_norm(asm_now.gradient);
    ++it;
  }

  SolveReport rep{std::move(v)};
  rep.energy = asm_now.energy;
  rep.residual_dual_norm = gd;
  rep.min_u = rep.u.interior_min();
  rep.negative_measure = nonpositive_measure(rep.u);
  rep.iterations = it;
  rep.converged = true;
  return rep;
}

FeFunction positive_seed(const Mesh& mesh, const ExponentField& p) {
  const double pi = std::numbers::pi;
  FeFunction phi =
      mesh.dim() == 1
          ? FeFunction::sample(mesh, [pi](double x, double) { return std::sin(pi * x); })
          : FeFunction::sample(
                mesh, [pi](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); });
  for (int b : mesh.boundary_nodes()) phi.nodal[b] = 0.0;  // exact zero trace
  const double norm = sobolev_norm(phi, p);
  phi.nodal /= norm;
  return phi;
}

std::pair<double, FeFunction> find_descent_endpoint(const ExponentField& p,
                                                    const TruncatedProblem& prob,
                                                    const FeFunction& phi) {
  require_same_mesh(phi, p);
  if (!(phi.interior_min() > 0.0)) {
    throw std::invalid_argument("descent seed must be positive in the interior");
  }
  if (phi.trace_max_abs() > 1e-14) {
    throw std::invalid_argument("descent seed must have zero trace");
  }
  if (std::fabs(sobolev_norm(phi, p) - 1.0) > 1e-6) {
    throw std::invalid_argument("descent seed must have unit Sobolev norm");
  }
  double t = 1.0;
  const double t_cap = std::ldexp(1.0, 60);
  while (t <= t_cap) {
    FeFunction v = scaled(phi, t);
    if (assemble_energy(v, p, prob) < 0.0) return {t, std::move(v)};
    t *= 2.0;
  }
  throw NoDescent("energy stays nonnegative along the ray up to t = 2^60");
}

std::pair<SolveReport, MountainPassState> mountain_pass(const ExponentField& p,
                                                        const TruncatedProblem& prob,
                                                        const Mesh& mesh,
                                                        const MountainPassOptions& opts) {
  if (opts.path_points < 3) throw std::invalid_argument("mountain_pass needs path_points >= 3");
  RieszMap riesz(mesh);
  const FeFunction phi = positive_seed(mesh, p);
  auto [t1, v1] = find_descent_endpoint(p, prob, phi);

  MountainPassState state;
  state.t1 = t1;
  state.energy_upper_bound = std::pow(t1, p.max_exponent()) / p.min_exponent() +
                             t1 * prob.lambda * l1_norm(phi);

  const int P = opts.path_points;
  state.path.reserve(P);
  state.energies.resize(P);
  for (int k = 0; k < P; ++k) {
    state.path.push_back(scaled(v1, static_cast<double>(k) / (P - 1)));
    state.energies[k] = assemble_energy(state.path[k], p, prob);
  }
  state.initial_max_energy = *std::max_element(state.energies.begin(), state.energies.end());

  const auto locate_max = [&state]() {
    int arg = 0;
    for (int k = 1; k < static_cast<int>(state.energies.size()); ++k) {
      if (state.energies[k] > state.energies[arg]) arg = k;  // ties keep the lowest index
    }
    return arg;
  };

  const auto respace_by_arclength = [&]() {
    const int n = static_cast<int>(state.path.size());
    std::vector<double> arc(n, 0.0);
    for (int k = 1; k < n; ++k) {
      arc[k] = arc[k - 1] +
               riesz.norm(state.path[k].free_values() - state.path[k - 1].free_values());
    }
    if (arc.back() <= 0.0) return;
    std::vector<FeFunction> fresh;
    std::vector<double> fresh_e(n);
    fresh.reserve(n);
    fresh.push_back(state.path.front());
    int seg = 1;
    for (int k = 1; k + 1 < n; ++k) {
      const double target = arc.back() * k / (n - 1);
      while (seg + 1 < n && arc[seg] < target) ++seg;
      const double span = arc[seg] - arc[seg - 1];
      const double w = span > 0.0 ? (target - arc[seg - 1]) / span : 0.0;
      FeFunction mix = state.path[seg - 1];
      mix.nodal = (1.0 - w) * state.path[seg - 1].nodal + w * state.path[seg].nodal;
      fresh.push_back(std::move(mix));
    }
    fresh.push_back(state.path.back());
    fresh_e.front() = state.energies.front();
    fresh_e.back() = state.energies.back();
    for (int k = 1; k + 1 < n; ++k) fresh_e[k] = assemble_energy(fresh[k], p, prob);
    // Re-sampling the polyline may raise the sampled maximum when nodes had
    // slipped off the ridge; that is a discretization repair, not an energy
    // increase of the deformation, and it is what keeps the crest resolved.
    state.path = std::move(fresh);
    state.energies = std::move(fresh_e);
  };

  int iteration = 0;
  int stalls = 0;
  bool handed_off = false;
  double best_gd = std::numeric_limits<double>::infinity();
  std::optional<FeFunction> best_point;
  std::optional<NewtonOutcome> early;
  for (; iteration < opts.max_iterations; ++iteration) {
    state.max_index = locate_max();
    if (state.max_index == 0 || state.max_index == P - 1) {
      throw CollapsedPath("path maximum reached an endpoint");
    }
    if (state.energies[state.max_index] < 0.0) {
      throw CollapsedPath("path maximum fell below zero energy");
    }

    FeFunction& peak = state.path[state.max_index];
    AssemblyResult asm_peak = assemble_gradient(peak, p, prob);
    const double gd = riesz.dual_norm(asm_peak.gradient);
    state.grad_dual_norm = gd;
    if (opts.keep_history) {
      state.history.push_back({iteration, state.max_index, state.energies[state.max_index], gd,
                               sobolev_norm(peak, p)});
    }
    if (gd <= opts.tol_path) {
      handed_off = true;
      break;
    }
    if (gd < best_gd) {
      best_gd = gd;
      best_point = peak;
    }
    // The 41-point path resolves the crest only to O(spacing); when it has
    // localized the saddle well enough, Newton's basin is usually already
    // reachable. Try it periodically from the best point seen; keep deforming
    // if the attempt does not produce a positive-energy critical point.
    if (best_point && iteration >= 200 && iteration % 500 == 0) {
      NewtonOutcome attempt =
          newton_refine(*best_point, p, prob, riesz, opts.tol, 30, opts.hessian_eps);
      if (attempt.converged && attempt.energy > 0.0 &&
          attempt.energy <= state.initial_max_energy + 1e-9) {
        early = std::move(attempt);
        handed_off = true;
        break;
      }
    }

    const Eigen::VectorXd d = -riesz.solve(asm_peak.gradient);
    const double slope = asm_peak.gradient.dot(d);  // = -gd^2 < 0
    const Eigen::VectorXd free0 = peak.free_values();
    const double e0 = state.energies[state.max_index];
    // Deformation steps must stay local: a full preconditioned step can jump
    // across the ridge into the negative valley and tear the path. Cap the
    // initial step by the local path spacing in the K metric.
    const double spacing =
        0.5 * (riesz.norm(free0 - state.path[state.max_index - 1].free_values()) +
               riesz.norm(state.path[state.max_index + 1].free_values() - free0));
    const double d_norm = riesz.norm(d);
    double alpha = d_norm > 0.0 ? std::min(1.0, spacing / d_norm) : 1.0;
    bool accepted = false;
    FeFunction trial = peak;
    for (int ls = 0; ls < kArmijoMaxTrials; ++ls, alpha *= 0.5) {
      trial.set_free_values(free0 + alpha * d);
      const double e_trial = assemble_energy(trial, p, prob);
      if (e_trial <= e0 + kArmijoC * alpha * slope) {
        peak = trial;
        state.energies[state.max_index] = e_trial;
        accepted = true;
        break;
      }
    }
    if (!accepted && ++stalls > 20) {
      throw NoConvergence("path deformation stalled", iteration);
    }
    if ((iteration + 1) % 10 == 0) respace_by_arclength();
  }
  if (!handed_off) {
    throw NoConvergence("path maximum did not localize", iteration);
  }

  NewtonOutcome newt = early ? std::move(*early)
                             : newton_refine(state.path[state.max_index], p, prob, riesz, opts.tol,
                                             opts.max_newton_iterations, opts.hessian_eps);
  state.iterations = iteration + newt.iterations;
  state.grad_dual_norm = newt.residual;
  if (opts.keep_history) {
    state.history.push_back({state.iterations, -1, newt.energy, newt.residual,
                             sobolev_norm(newt.u, p)});
  }
  if (!newt.converged) {
    throw NoConvergence("Newton refinement from the pass point", state.iterations);
  }

  SolveReport rep{std::move(newt.u)};
  rep.energy = newt.energy;
  rep.residual_dual_norm = newt.residual;
  rep.min_u = rep.u.interior_min();
  rep.negative_measure = nonpositive_measure(rep.u);
  rep.iterations = state.iterations;
  rep.converged = true;
  return {std::move(rep), std::move(state)};
}

PalaisSmaleReport palais_smale_monitor(const MountainPassState& state) {
  if (state.history.size() < 2) {
    throw std::invalid_argument("palais_smale_monitor needs at least 2 recorded iterations");
  }
  PalaisSmaleReport rep;
  rep.rows = state.history;
  rep.final_grad_dual_norm = rep.rows.back().grad_dual_norm;
  rep.max_sobolev_norm = 0.0;
  rep.min_energy = std::numeric_limits<double>::infinity();
  rep.max_energy = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    rep.max_sobolev_norm = std::max(rep.max_sobolev_norm, rep.rows[i].sobolev_norm);
    if (i >= 1) {
      rep.min_energy = std::min(rep.min_energy, rep.rows[i].energy);
      rep.max_energy = std::max(rep.max_energy, rep.rows[i].energy);
    }
  }
  return rep;
}

ComparisonReport verify_comparison(const FeFunction& lower, const FeFunction& upper,
                                   const ExponentField& p, const Mesh& mesh, double tol) {
  require_same_mesh(lower, upper);
  if (lower.mesh != &mesh) throw MeshMismatch("comparison pair not on the given mesh");
  ComparisonReport rep;
  const Eigen::VectorXd a_lower = p_laplacian_action(lower, p);
  const Eigen::VectorXd a_upper = p_laplacian_action(upper, p);
  rep.hypothesis_violation = (a_lower - a_upper).maxCoeff();
  rep.conclusion_violation = (lower.nodal - upper.nodal).maxCoeff();
  rep.hypothesis_ok = rep.hypothesis_violation <= tol;
  rep.conclusion_ok = rep.conclusion_violation <= tol;
  return rep;
}

BoundarySlopeReport boundary_slope_check(const FeFunction& u, const Mesh& mesh) {
  if (u.mesh != &mesh) throw MeshMismatch("function not on the given mesh");
  BoundarySlopeReport rep;
  rep.degenerate = u.max_abs() == 0.0;
  std::vector<double> slope(mesh.vertex_count(), std::numeric_limits<double>::infinity());
  const int nloc = mesh.nodes_per_element();
  for (const auto& el : mesh.elements()) {
    for (int a = 0; a < nloc; ++a) {
      if (!mesh.on_boundary(el[a])) continue;
      for (int b = 0; b < nloc; ++b) {
        if (a == b || mesh.on_boundary(el[b])) continue;
        const double dist = (mesh.vertices()[el[b]] - mesh.vertices()[el[a]]).norm();
        slope[el[a]] = std::min(slope[el[a]], (u.nodal[el[b]] - u.nodal[el[a]]) / dist);
      }
    }
  }
  rep.min_inward_slope = std::numeric_limits<double>::infinity();
  for (int b : mesh.boundary_nodes()) {
    if (std::isfinite(slope[b])) {
      ++rep.nodes_checked;
      rep.min_inward_slope = std::min(rep.min_inward_slope, slope[b]);
    }
  }
  if (rep.nodes_checked == 0) rep.min_inward_slope = 0.0;
  return rep;
}

SweepResult lambda_sweep(const ExponentField& p, const Nonlinearity& base, const Mesh& mesh,
                         const std::vector<double>& lambdas, const SweepOptions& opts) {
  if (lambdas.empty()) throw std::invalid_argument("lambda list is empty");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0)) throw std::invalid_argument("lambda values must be positive");
    if (i > 0 && !(lambdas[i] < lambdas[i - 1])) {
      throw std::invalid_argument("lambda list must be strictly decreasing");
    }
  }

  SweepResult result;
  result.rows.resize(lambdas.size());

  const auto run_full = [&](double lambda) -> SweepRow {
    SweepRow row;
    row.lambda = lambda;
    try {
      auto [rep, state] = mountain_pass(p, TruncatedProblem{base, lambda}, mesh, opts.mpa);
      row.energy = rep.energy;
      row.min_u = rep.min_u;
      row.negative_measure = rep.negative_measure;
      row.residual = rep.residual_dual_norm;
      row.iterations = rep.iterations;
      row.converged = rep.converged;
      return row;
    } catch (const Error&) {
      row.converged = false;
      return row;
    }
  };

  if (opts.parallel && !opts.warm_start) {
    std::vector<std::future<SweepRow>> jobs;
    jobs.reserve(lambdas.size());
    for (double lambda : lambdas) {
      jobs.push_back(std::async(std::launch::async, run_full, lambda));
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) result.rows[i] = jobs[i].get();
  } else {
    RieszMap riesz(mesh);
    std::optional<FeFunction> previous;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      const double lambda = lambdas[i];
      SweepRow row;
      row.lambda = lambda;
      bool done = false;
      if (opts.warm_start && previous) {
        // Newton continuation along the branch
        const TruncatedProblem prob{base, lambda};
        NewtonOutcome cont = newton_refine(*previous, p, prob, riesz, opts.mpa.tol,
                                           opts.mpa.max_newton_iterations, opts.mpa.hessian_eps);
        if (cont.converged && cont.energy > 0.0) {
          row.energy = cont.energy;
          row.min_u = cont.u.interior_min();
          row.negative_measure = nonpositive_measure(cont.u);
          row.residual = cont.residual;
          row.iterations = cont.iterations;
          row.converged = true;
          previous = std::move(cont.u);
          done = true;
        }
      }
      if (!done) {
        try {
          auto [rep, state] = mountain_pass(p, TruncatedProblem{base, lambda}, mesh, opts.mpa);
          row.energy = rep.energy;
          row.min_u = rep.min_u;
          row.negative_measure = rep.negative_measure;
          row.residual = rep.residual_dual_norm;
          row.iterations = rep.iterations;
          row.converged = true;
          previous = std::move(rep.u);
        } catch (const Error&) {
          row.converged = false;
        }
      }
      result.rows[i] = row;
    }
  }

  // threshold: the largest listed lambda whose entire tail is positive
  int first_good = static_cast<int>(result.rows.size());
  for (int i = static_cast<int>(result.rows.size()) - 1; i >= 0; --i) {
    if (result.rows[i].converged && result.rows[i].min_u > 0.0) {
      first_good = i;
    } else {
      break;
    }
  }
  if (first_good < static_cast<int>(result.rows.size())) {
    result.lambda_threshold = result.rows[first_good].lambda;
  }
  return result;
}

}  // namespace pxmp

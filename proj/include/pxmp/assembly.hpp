#pragma once

#include <Eigen/Sparse>
#include <optional>

#include "pxmp/exponent.hpp"
#include "pxmp/nonlinearity.hpp"

namespace pxmp {

/// Output of an assembly pass over the free (non-Dirichlet) nodes.
struct AssemblyResult {
  double energy = 0.0;
  Eigen::VectorXd gradient;
  std::optional<Eigen::SparseMatrix<double>> hessian;
};

/// Energy E(u) = integral of |grad u|^{p(x)}/p(x) - F_T(u), with F_T the
/// truncated primitive of the problem. Exact 0 for u == 0.
double assemble_energy(const FeFunction& u, const ExponentField& p, const TruncatedProblem& prob);

/// First variation: gradient[i] pairs with the hat function of free node i,
///   integral of |grad u|^{p-2} <grad u, grad phi_i> - f_T(u) phi_i.
AssemblyResult assemble_gradient(const FeFunction& u, const ExponentField& p,
                                 const TruncatedProblem& prob);

/// Regularized second variation; with s2 = |grad u|^2 + eps the principal
/// block is s2^{(p-2)/2} [<grad v, grad w> + (p-2) <grad u, grad v><grad u, grad w>/s2]
/// and the reaction block is -f_T'(u) v w (right derivative at the kinks).
/// Also fills energy and gradient.
AssemblyResult assemble_hessian(const FeFunction& u, const ExponentField& p,
                                const TruncatedProblem& prob, double eps = 1e-10);

/// The convex auxiliary functional J(v) = integral of |grad v|^{p(x)}/p(x) + lambda v,
/// whose minimizer solves the constant-load comparison problem.
double torsion_energy(const FeFunction& v, const ExponentField& p, double lambda);
AssemblyResult torsion_gradient(const FeFunction& v, const ExponentField& p, double lambda);
AssemblyResult torsion_hessian(const FeFunction& v, const ExponentField& p, double lambda,
                               double eps = 1e-10);

/// p == 2 stiffness matrix over free nodes (exact, no quadrature error).
Eigen::SparseMatrix<double> assemble_stiffness(const Mesh& m);
/// Load vector m_i = integral of phi_i over free nodes.
Eigen::VectorXd assemble_load(const Mesh& m);

/// Principal-part action a(u)_i = integral of |grad u|^{p-2} <grad u, grad phi_i>.
Eigen::VectorXd p_laplacian_action(const FeFunction& u, const ExponentField& p);

/// Quadrature measure of {u <= 0}.
double nonpositive_measure(const FeFunction& u);

}  // namespace pxmp

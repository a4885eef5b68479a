#pragma once

#include <cstdint>

#include "pxmp/exponent.hpp"
#include "pxmp/mesh.hpp"

namespace pxmp {

/// Modular rho(u) = integral of |u(x)|^{p(x)}, by the mesh quadrature rule.
/// Zero exactly when u vanishes at every quadrature point.
double modular(const FeFunction& u, const ExponentField& p);

/// Luxemburg norm inf{ s > 0 : rho(u/s) <= 1 }, located by monotone
/// bracketing plus bisection on the strictly decreasing map s -> rho(u/s).
/// Returns 0 for u == 0. Throws NonFinite if the modular is not finite at the
/// initial bracket.
double luxemburg_norm(const FeFunction& u, const ExponentField& p);

/// Luxemburg norm of |grad u| (piecewise constant per element). Requires a
/// zero trace: throws NonZeroTrace if any Dirichlet node exceeds 1e-14.
double sobolev_norm(const FeFunction& u, const ExponentField& p);

/// Quadrature L1 norm of u and of the pointwise product |f g|.
double l1_norm(const FeFunction& u);
double product_l1_norm(const FeFunction& f, const FeFunction& g);

/// Both chains of the norm-modular sandwich, evaluated with slack values:
///   ||u|| <= 1:  ||u||^{p+} <= rho(u) <= ||u||^{p-}  (and rho <= ||u||),
///   ||u|| >= 1:  ||u||^{p-} <= rho(u) <= ||u||^{p+}.
struct NormModularReport {
  double norm = 0.0;
  double modular = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double slack_lower = 0.0;  // modular - lower
  double slack_upper = 0.0;  // upper - modular
  bool pass = false;
};
NormModularReport check_norm_modular(const FeFunction& u, const ExponentField& p);

/// Hoelder bound ||fg||_1 <= 2 ||f||_{p} ||g||_{p'}; the constant 2 dominates
/// the classical 1/p- + 1/(p')- for every admissible exponent.
struct HolderReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double norm_f = 0.0;
  double norm_g = 0.0;
  double slack = 0.0;  // rhs - lhs
  bool pass = false;
};
HolderReport check_holder(const FeFunction& f, const FeFunction& g, const ExponentField& p);

enum class RegularityKind { log_holder, holder };

/// Smallest admissible regularity constant of the exponent field over all
/// quadrature-point pairs with |x - y| < 1/2:
///   log_holder: C0 = sup |p(x)-p(y)| * (-log|x-y|),
///   holder:     L  = sup |p(x)-p(y)| / |x-y|^gamma.
/// A finite constant is a pass; the value grows without bound under mesh
/// refinement when the exponent violates the continuity class.
struct RegularityReport {
  RegularityKind kind = RegularityKind::holder;
  double gamma = 1.0;    // only meaningful for holder
  double constant = 0.0;
  double worst_distance = 0.0;  // pair distance realizing the constant
  std::int64_t pairs = 0;
};
RegularityReport check_exponent_regularity(const ExponentField& p, RegularityKind kind,
                                           double gamma = 1.0);

/// Empirical lower bound for the embedding constant ||u||_q <= K ||u||_{1,p}:
/// the max of ||u||_{q}/||grad u||_{p} over `trials` random zero-trace draws.
/// Requires p <= q pointwise; throws DegenerateInput if a trial vanishes.
double estimate_embedding_constant(const ExponentField& p, const ExponentField& q, int trials,
                                   std::uint64_t seed = 0);

}  // namespace pxmp

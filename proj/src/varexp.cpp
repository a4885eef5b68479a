#include "pxmp/varexp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "pxmp/errors.hpp"

namespace pxmp {

namespace {

// Values of |v| at every quadrature point, for the two function kinds the
// norms operate on: the interpolant itself and the elementwise gradient.
std::vector<double> quad_values(const FeFunction& u) {
  const Mesh& m = *u.mesh;
  std::vector<double> v(m.quadrature_count());
  for (int q = 0; q < m.quadrature_count(); ++q) v[q] = std::fabs(u.at_quad(q));
  return v;
}

std::vector<double> quad_gradient_magnitudes(const FeFunction& u) {
  const Mesh& m = *u.mesh;
  std::vector<double> per_element(m.element_count());
  for (int e = 0; e < m.element_count(); ++e) per_element[e] = u.gradient(e).norm();
  std::vector<double> v(m.quadrature_count());
  for (int q = 0; q < m.quadrature_count(); ++q) {
    v[q] = per_element[m.quadrature()[q].element];
  }
  return v;
}

double modular_of_values(const Mesh& m, const std::vector<double>& v, const ExponentField& p,
                         double scale) {
  double sum = 0.0;
  for (int q = 0; q < m.quadrature_count(); ++q) {
    if (v[q] != 0.0) sum += m.quadrature()[q].weight * std::pow(v[q] / scale, p.at(q));
  }
  return sum;
}

// inf{ s : rho(v/s) <= 1 } for the sampled values v (not all zero).
// s -> rho(v/s) is continuous and strictly decreasing, so a doubling/halving
// bracket followed by bisection converges unconditionally.
double luxemburg_of_values(const Mesh& m, const std::vector<double>& v, const ExponentField& p) {
  double vmax = 0.0;
  for (double a : v) vmax = std::max(vmax, a);
  if (vmax == 0.0) return 0.0;
  if (!std::isfinite(vmax)) throw NonFinite("non-finite sample values in Luxemburg norm");

  double hi = vmax;  // rho(v/vmax) <= |Omega| since each ratio <= 1
  double rho_hi = modular_of_values(m, v, p, hi);
  if (!std::isfinite(rho_hi)) throw NonFinite("modular not finite at the initial bracket");
  double lo = hi;
  if (rho_hi > 1.0) {
    for (int i = 0; i < 1100 && rho_hi > 1.0; ++i) {
      lo = hi;
      hi *= 2.0;
      rho_hi = modular_of_values(m, v, p, hi);
      if (!std::isfinite(rho_hi)) throw NonFinite("modular not finite while bracketing");
    }
  } else {
    double rho_lo = rho_hi;
    for (int i = 0; i < 1100 && rho_lo < 1.0; ++i) {
      hi = lo;
      lo *= 0.5;
      if (lo == 0.0) return 0.0;  // rho < 1 at every representable scale
      rho_lo = modular_of_values(m, v, p, lo);
      if (!std::isfinite(rho_lo)) throw NonFinite("modular not finite while bracketing");
    }
  }
  // Bisect to relative bracket width <= 1e-15 (or 200 iterations).
  for (int i = 0; i < 200 && (hi - lo) > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (modular_of_values(m, v, p, mid) >= 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double modular(const FeFunction& u, const ExponentField& p) {
  require_same_mesh(u, p);
  const Mesh& m = *u.mesh;
  double sum = 0.0;
  for (int q = 0; q < m.quadrature_count(); ++q) {
    const double v = std::fabs(u.at_quad(q));
    if (v != 0.0) sum += m.quadrature()[q].weight * std::pow(v, p.at(q));
  }
  return sum;
}

double luxemburg_norm(const FeFunction& u, const ExponentField& p) {
  require_same_mesh(u, p);
  return luxemburg_of_values(*u.mesh, quad_values(u), p);
}

double sobolev_norm(const FeFunction& u, const ExponentField& p) {
  require_same_mesh(u, p);
  if (u.trace_max_abs() > 1e-14) {
    throw NonZeroTrace("sobolev_norm needs a zero trace on the Dirichlet boundary");
  }
  return luxemburg_of_values(*u.mesh, quad_gradient_magnitudes(u), p);
}

double l1_norm(const FeFunction& u) {
  const Mesh& m = *u.mesh;
  double sum = 0.0;
  for (int q = 0; q < m.quadrature_count(); ++q) {
    sum += m.quadrature()[q].weight * std::fabs(u.at_quad(q));
  }
  return sum;
}

double product_l1_norm(const FeFunction& f, const FeFunction& g) {
  require_same_mesh(f, g);
  const Mesh& m = *f.mesh;
  double sum = 0.0;
  for (int q = 0; q < m.quadrature_count(); ++q) {
    sum += m.quadrature()[q].weight * std::fabs(f.at_quad(q) * g.at_quad(q));
  }
  return sum;
}

NormModularReport check_norm_modular(const FeFunction& u, const ExponentField& p) {
  NormModularReport rep;
  rep.norm = luxemburg_norm(u, p);
  rep.modular = modular(u, p);
  const double pmin = p.min_exponent(), pmax = p.max_exponent();
  if (rep.norm <= 1.0) {
    rep.lower = std::pow(rep.norm, pmax);
    rep.upper = std::pow(rep.norm, pmin);
  } else {
    rep.lower = std::pow(rep.norm, pmin);
    rep.upper = std::pow(rep.norm, pmax);
  }
  rep.slack_lower = rep.modular - rep.lower;
  rep.slack_upper = rep.upper - rep.modular;
  const double tol = 1e-10 * std::max(1.0, rep.modular);
  rep.pass = rep.slack_lower >= -tol && rep.slack_upper >= -tol;
  // The lemma's "in particular" clause: rho(u) <= ||u|| when ||u|| <= 1.
  if (rep.norm <= 1.0 && rep.modular > rep.norm + tol) rep.pass = false;
  return rep;
}

HolderReport check_holder(const FeFunction& f, const FeFunction& g, const ExponentField& p) {
  require_same_mesh(f, g);
  require_same_mesh(f, p);
  HolderReport rep;
  rep.lhs = product_l1_norm(f, g);
  rep.norm_f = luxemburg_norm(f, p);
  rep.norm_g = luxemburg_norm(g, p.conjugate());
  rep.rhs = 2.0 * rep.norm_f * rep.norm_g;
  rep.slack = rep.rhs - rep.lhs;
  rep.pass = rep.lhs <= rep.rhs + 1e-10 * std::max(1.0, rep.rhs);
  return rep;
}

RegularityReport check_exponent_regularity(const ExponentField& p, RegularityKind kind,
                                           double gamma) {
  const Mesh& m = p.mesh();
  RegularityReport rep;
  rep.kind = kind;
  rep.gamma = gamma;
  const int nq = m.quadrature_count();
  for (int a = 0; a < nq; ++a) {
    const auto& xa = m.quadrature()[a].x;
    for (int b = a + 1; b < nq; ++b) {
      const double d = (xa - m.quadrature()[b].x).norm();
      if (d <= 0.0 || d >= 0.5) continue;
      ++rep.pairs;
      const double dp = std::fabs(p.at(a) - p.at(b));
      const double c =
          kind == RegularityKind::log_holder ? dp * (-std::log(d)) : dp / std::pow(d, gamma);
      if (c > rep.constant) {
        rep.constant = c;
        rep.worst_distance = d;
      }
    }
  }
  return rep;
}

double estimate_embedding_constant(const ExponentField& p, const ExponentField& q, int trials,
                                   std::uint64_t seed) {
  require_same_mesh(p, q);
  for (int i = 0; i < p.mesh().quadrature_count(); ++i) {
    if (p.at(i) > q.at(i) + 1e-14) {
      throw ExponentOutOfRange("embedding estimate needs p(x) <= q(x) pointwise");
    }
  }
  const Mesh& m = p.mesh();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  double best = 0.0;
  for (int t = 0; t < trials; ++t) {
    FeFunction u = FeFunction::zero(m);
    for (int f = 0; f < m.free_count(); ++f) u.nodal[m.free_vertex(f)] = uni(rng);
    if (u.max_abs() == 0.0) throw DegenerateInput("trial function is identically zero");
    best = std::max(best, luxemburg_norm(u, q) / sobolev_norm(u, p));
  }
  return best;
}

}  // namespace pxmp

#include "pxmp/property_suite.hpp"

#include <cmath>
#include <limits>

#include "pxmp/varexp.hpp"

namespace pxmp {

namespace {

struct CheckAccumulator {
  PropertyCheck check;
  explicit CheckAccumulator(std::string suite, std::string name) {
    check.suite = std::move(suite);
    check.check = std::move(name);
    check.worst_slack = std::numeric_limits<double>::infinity();
  }
  void record(double slack) {
    ++check.draws;
    check.worst_slack = std::min(check.worst_slack, slack);
    if (slack < 0.0) ++check.failures;
  }
};

}  // namespace

ExponentField random_exponent(const Mesh& m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  switch (static_cast<int>(rng() % 3)) {
    case 0:
      return ExponentField::constant(m, 1.6 + 2.0 * uni(rng));
    case 1: {
      const double base = 1.6 + uni(rng), slope = 0.1 + 1.5 * uni(rng);
      return ExponentField::from_expression(
          m, Expr::parse(std::to_string(base) + " + " + std::to_string(slope) + "*x"));
    }
    default: {
      const double base = 2.0, amp = 0.5 + uni(rng);
      return ExponentField::from_expression(
          m, Expr::parse(std::to_string(base) + " + " + std::to_string(amp) +
                         "*sin(3*(x+y))*sin(3*(x+y))"));
    }
  }
}

FeFunction random_zero_trace(const Mesh& m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::uniform_real_distribution<double> mag(-2.0, 2.0);
  const double scale = std::pow(10.0, mag(rng));
  FeFunction u = FeFunction::zero(m);
  for (int f = 0; f < m.free_count(); ++f) u.nodal[m.free_vertex(f)] = scale * uni(rng);
  return u;
}

std::vector<PropertyCheck> run_function_space_suite(const Mesh& m, int draws, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> alpha_dist(0.1, 10.0);
  std::uniform_real_distribution<double> scale_dist(1.0, 4.0);

  CheckAccumulator homogeneity("norm_axioms", "homogeneity");
  CheckAccumulator triangle("norm_axioms", "triangle_inequality");
  CheckAccumulator definiteness("norm_axioms", "zero_iff_zero");
  CheckAccumulator unit_sphere("unit_sphere", "modular_of_normalized");
  CheckAccumulator monotone("modular", "monotone_in_scale");
  CheckAccumulator sandwich("norm_modular", "sandwich");
  CheckAccumulator holder("holder", "c_equals_2");

  for (int d = 0; d < draws; ++d) {
    const ExponentField p = random_exponent(m, rng);
    const FeFunction u = random_zero_trace(m, rng);
    const FeFunction v = random_zero_trace(m, rng);
    const double nu = luxemburg_norm(u, p);
    const double nv = luxemburg_norm(v, p);

    // homogeneity |alpha| ||u|| = ||alpha u||, relative error <= 1e-10
    const double alpha = alpha_dist(rng);
    {
      FeFunction au{&m, alpha * u.nodal};
      const double lhs = luxemburg_norm(au, p);
      const double rel = std::fabs(lhs - alpha * nu) / std::max(1.0, alpha * nu);
      homogeneity.record(1e-10 - rel);
    }

    // triangle inequality with 1e-10 additive slack
    {
      FeFunction sum{&m, u.nodal + v.nodal};
      triangle.record(nu + nv + 1e-10 - luxemburg_norm(sum, p));
    }

    // ||u|| = 0 iff u vanishes at the quadrature points
    {
      const bool is_zero = modular(u, p) == 0.0;
      definiteness.record((nu > 0.0) != is_zero ? (is_zero ? -nu : nu) : 1.0);
    }

    // unit sphere: |rho(u / ||u||) - 1| <= 1e-10
    if (nu > 0.0) {
      FeFunction unit{&m, u.nodal / nu};
      unit_sphere.record(1e-10 - std::fabs(modular(unit, p) - 1.0));
    }

    // strict monotonicity of s -> rho(u/s)
    if (nu > 0.0) {
      const double s1 = nu / scale_dist(rng);
      const double s2 = nu * scale_dist(rng);
      FeFunction u1{&m, u.nodal / s1}, u2{&m, u.nodal / s2};
      monotone.record(modular(u1, p) - modular(u2, p));
    }

    // norm-modular sandwich (both chains, with the "in particular" clause)
    {
      const NormModularReport rep = check_norm_modular(u, p);
      const double tol = 1e-10 * std::max(1.0, rep.modular);
      sandwich.record(std::min(rep.slack_lower, rep.slack_upper) + tol);
    }

    // Hoelder with c = 2
    {
      const HolderReport rep = check_holder(u, v, p);
      holder.record(rep.slack + 1e-10 * std::max(1.0, rep.rhs));
    }
  }

  return {homogeneity.check, triangle.check, definiteness.check, unit_sphere.check,
          monotone.check,    sandwich.check, holder.check};
}

}  // namespace pxmp

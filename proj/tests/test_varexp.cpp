#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "pxmp/errors.hpp"
#include "pxmp/property_suite.hpp"
#include "pxmp/varexp.hpp"

using namespace pxmp;

namespace {
const Mesh& interval64() {
  static const Mesh m = Mesh::interval(64);
  return m;
}
}  // namespace

TEST_CASE("modular closed forms") {
  const Mesh& m = interval64();
  const ExponentField p2 = ExponentField::constant(m, 2.0);

  const FeFunction one = FeFunction::sample(m, [](double, double) { return 1.0; });
  CHECK(modular(one, p2) == doctest::Approx(1.0).epsilon(1e-14));

  const FeFunction id = FeFunction::sample(m, [](double x, double) { return x; });
  CHECK(modular(id, p2) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));  // Gauss is exact here

  CHECK(modular(FeFunction::zero(m), p2) == 0.0);
}

TEST_CASE("luxemburg norm: constant-exponent closed forms") {
  const Mesh& m = interval64();
  const ExponentField p2 = ExponentField::constant(m, 2.0);

  const FeFunction two = FeFunction::sample(m, [](double, double) { return 2.0; });
  CHECK(luxemburg_norm(two, p2) == doctest::Approx(2.0).epsilon(1e-12));

  const FeFunction id = FeFunction::sample(m, [](double x, double) { return x; });
  CHECK(luxemburg_norm(id, p2) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));

  CHECK(luxemburg_norm(FeFunction::zero(m), p2) == 0.0);
}

TEST_CASE("luxemburg norm: variable exponent against a root-finding oracle") {
  const Mesh& m = interval64();
  const ExponentField p = ExponentField::from_expression(m, Expr::parse("2+x"));

  // u == 1 on a measure-one domain has norm exactly 1 for any exponent.
  const FeFunction one = FeFunction::sample(m, [](double, double) { return 1.0; });
  CHECK(luxemburg_norm(one, p) == doctest::Approx(1.0).epsilon(1e-12));

  // u(x) = x with p(x) = 2+x: solve the continuous equation
  // integral_0^1 (x/s)^{2+x} dx = 1 with adaptive quadrature + bisection.
  const FeFunction id = FeFunction::sample(m, [](double x, double) { return x; });
  const auto rho_minus_1 = [](double s) {
    return oracles::integrate(
               [s](double x) { return x == 0.0 ? 0.0 : std::pow(x / s, 2.0 + x); }, 0.0, 1.0) -
           1.0;
  };
  const double s_star = oracles::bisect_root(rho_minus_1, 0.1, 1.0);
  CHECK(luxemburg_norm(id, p) == doctest::Approx(s_star).epsilon(1e-8));
}

TEST_CASE("sobolev norm closed forms and scaling") {
  const Mesh& m = interval64();
  const ExponentField p2 = ExponentField::constant(m, 2.0);

  CHECK(sobolev_norm(FeFunction::zero(m), p2) == 0.0);

  FeFunction bump = FeFunction::sample(m, [](double x, double) { return x * (1 - x); });
  const double h = 1.0 / 64;
  // the interpolant's gradient loses exactly h^2/3 of the L2 mass
  CHECK(sobolev_norm(bump, p2) ==
        doctest::Approx(std::sqrt(1.0 / 3.0 - h * h / 3.0)).epsilon(1e-12));
  CHECK(sobolev_norm(bump, p2) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-3));

  FeFunction scaled = bump;
  scaled.nodal *= 2.5;
  CHECK(sobolev_norm(scaled, p2) == doctest::Approx(2.5 * sobolev_norm(bump, p2)).epsilon(1e-12));

  FeFunction bad = bump;
  bad.nodal[0] = 1e-6;
  CHECK_THROWS_AS(sobolev_norm(bad, p2), NonZeroTrace);
}

TEST_CASE("conjugate exponent is the pointwise dual") {
  const Mesh& m = interval64();
  CHECK(ExponentField::constant(m, 2.0).conjugate().at(0) == doctest::Approx(2.0));
  CHECK(ExponentField::constant(m, 3.0).conjugate().at(0) == doctest::Approx(1.5));

  const ExponentField p = ExponentField::from_expression(m, Expr::parse("2+x"));
  const ExponentField pc = p.conjugate();
  for (int q = 0; q < m.quadrature_count(); ++q) {
    CHECK(pc.at(q) == doctest::Approx(p.at(q) / (p.at(q) - 1.0)).epsilon(1e-15));
    CHECK(1.0 / p.at(q) + 1.0 / pc.at(q) == doctest::Approx(1.0).epsilon(1e-15));
  }
  // p(1) = 3 so the conjugate approaches 1.5 at the right edge
  CHECK(pc.min_exponent() == doctest::Approx(3.0 / 2.0).epsilon(1e-2));
}

TEST_CASE("exponent fields reject p <= 1") {
  const Mesh& m = interval64();
  CHECK_THROWS_AS(ExponentField::constant(m, 1.0), ExponentOutOfRange);
  CHECK_THROWS_AS(ExponentField::from_expression(m, Expr::parse("1 + x/2 - x/2")),
                  ExponentOutOfRange);
}

TEST_CASE("norm-modular sandwich on the worked examples") {
  const Mesh& m = interval64();
  const ExponentField p2 = ExponentField::constant(m, 2.0);

  const FeFunction half = FeFunction::sample(m, [](double, double) { return 0.5; });
  NormModularReport rep = check_norm_modular(half, p2);
  CHECK(rep.pass);
  CHECK(rep.norm == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rep.modular == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(rep.modular <= rep.norm);  // the lemma's "in particular" clause

  const FeFunction three = FeFunction::sample(m, [](double, double) { return 3.0; });
  rep = check_norm_modular(three, p2);
  CHECK(rep.pass);
  CHECK(rep.norm == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(rep.modular == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(rep.lower == doctest::Approx(9.0).epsilon(1e-10));
  CHECK(rep.upper == doctest::Approx(9.0).epsilon(1e-10));

  const ExponentField pv = ExponentField::from_expression(m, Expr::parse("2+x"));
  const FeFunction one = FeFunction::sample(m, [](double, double) { return 1.0; });
  rep = check_norm_modular(one, pv);
  CHECK(rep.pass);  // boundary case: norm = modular = 1
  CHECK(rep.norm == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.modular == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Hoelder bound with c = 2 on the worked examples") {
  const Mesh& m = interval64();
  const ExponentField p2 = ExponentField::constant(m, 2.0);

  const FeFunction one = FeFunction::sample(m, [](double, double) { return 1.0; });
  HolderReport rep = check_holder(one, one, p2);
  CHECK(rep.pass);
  CHECK(rep.lhs == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.rhs == doctest::Approx(2.0).epsilon(1e-10));

  const FeFunction f = FeFunction::sample(m, [](double x, double) { return x; });
  const FeFunction g = FeFunction::sample(m, [](double x, double) { return 1.0 - x; });
  rep = check_holder(f, g, p2);
  CHECK(rep.pass);
  CHECK(rep.lhs == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(rep.rhs == doctest::Approx(2.0 / 3.0).epsilon(1e-4));

  // randomized sweep with a genuinely variable exponent
  const ExponentField pv =
      ExponentField::from_expression(m, Expr::parse("2 + sin(3*x)*sin(3*x)"));
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const FeFunction a = random_zero_trace(m, rng);
    const FeFunction b = random_zero_trace(m, rng);
    CHECK(check_holder(a, b, pv).pass);
  }
}

TEST_CASE("exponent regularity constants") {
  const Mesh& m = interval64();
  CHECK(check_exponent_regularity(ExponentField::constant(m, 2.0), RegularityKind::log_holder)
            .constant == 0.0);
  CHECK(check_exponent_regularity(ExponentField::constant(m, 2.0), RegularityKind::holder, 1.0)
            .constant == 0.0);

  const ExponentField affine = ExponentField::from_expression(m, Expr::parse("2+x"));
  const RegularityReport lip = check_exponent_regularity(affine, RegularityKind::holder, 1.0);
  CHECK(lip.constant == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lip.pairs > 0);

  // a jump exponent: the Lipschitz constant must blow up under refinement
  const Expr step = Expr::parse("2 + min(1, max(0, (x-0.5)*1e8))");
  double prev = 0.0;
  for (int n : {16, 32, 64}) {
    const Mesh fine = Mesh::interval(n);
    const double L =
        check_exponent_regularity(ExponentField::from_expression(fine, step),
                                  RegularityKind::holder, 1.0)
            .constant;
    CHECK(L > 2.0 * prev);
    prev = L;
  }
}

TEST_CASE("embedding constant estimate respects the Poincare bound") {
  const Mesh& m = interval64();
  const ExponentField p2 = ExponentField::constant(m, 2.0);
  const double pi = std::numbers::pi;

  const double ratio = estimate_embedding_constant(p2, p2, 25, 7);
  CHECK(ratio > 0.0);
  CHECK(ratio <= 1.0 / pi + 1e-12);  // discrete Rayleigh quotients only shrink the ratio

  // the first eigenfunction saturates the bound up to interpolation error
  FeFunction eig = FeFunction::sample(m, [pi](double x, double) { return std::sin(pi * x); });
  for (int b : m.boundary_nodes()) eig.nodal[b] = 0.0;
  const double r_eig = luxemburg_norm(eig, p2) / sobolev_norm(eig, p2);
  CHECK(r_eig == doctest::Approx(1.0 / pi).epsilon(1e-3));

  // homogeneity: the ratio ignores amplitude
  FeFunction eig2 = eig;
  eig2.nodal *= 2.0;
  CHECK(luxemburg_norm(eig2, p2) / sobolev_norm(eig2, p2) ==
        doctest::Approx(r_eig).epsilon(1e-12));

  const ExponentField p_lo = ExponentField::constant(m, 2.0);
  const ExponentField q_hi = ExponentField::constant(m, 3.0);
  CHECK(estimate_embedding_constant(p_lo, q_hi, 5, 3) > 0.0);
  CHECK_THROWS_AS(estimate_embedding_constant(q_hi, p_lo, 5, 3), ExponentOutOfRange);
}

TEST_CASE("randomized function-space suite passes on both built-in meshes") {
  for (const Mesh& m : {Mesh::interval(32), Mesh::unit_square(8)}) {
    for (const PropertyCheck& check : run_function_space_suite(m, 60, 99)) {
      INFO(check.suite, "/", check.check);
      CHECK(check.pass());
    }
  }
}

TEST_CASE("luxemburg norm reports non-finite input instead of clamping") {
  const Mesh& m = interval64();
  const ExponentField p2 = ExponentField::constant(m, 2.0);
  FeFunction u = FeFunction::zero(m);
  u.nodal[1] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(luxemburg_norm(u, p2), NonFinite);
}

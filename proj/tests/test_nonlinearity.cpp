#include <doctest.h>

#include <cmath>

#include "pxmp/errors.hpp"
#include "pxmp/mesh.hpp"
#include "pxmp/nonlinearity.hpp"

using namespace pxmp;

namespace {
const Mesh& mesh16() {
  static const Mesh m = Mesh::interval(16);
  return m;
}
Nonlinearity model(double q) { return Nonlinearity::power_model(q, 3.5, 3.5, 1.0); }
}  // namespace

TEST_CASE("truncated source branch values") {
  CHECK(TruncatedProblem{model(4), 0.7}.f(-1.0) == 0.0);
  CHECK(TruncatedProblem{model(4), 0.3}.f(0.0) == doctest::Approx(-0.3));
  CHECK(TruncatedProblem{model(4), 0.1}.f(1.0) == doctest::Approx(0.9));
  CHECK(TruncatedProblem{model(4), 0.5}.f(-3.0) == 0.0);
  CHECK(TruncatedProblem{model(4), 0.5}.f(-0.5) == doctest::Approx(-0.25));
}

TEST_CASE("truncated primitive branch values") {
  const TruncatedProblem prob{model(4), 0.4};
  CHECK(prob.F(-1.0) == doctest::Approx(0.2));  // the triangle area lambda/2
  CHECK(prob.F(-5.0) == 0.2);                   // exactly constant below -1
  CHECK(prob.F(0.0) == 0.0);
  CHECK(TruncatedProblem{model(4), 0.0}.F(2.0) == doctest::Approx(4.0));  // t^4/4
}

TEST_CASE("truncated source is continuous at the kinks") {
  for (double lambda : {0.01, 0.1, 0.5}) {
    const TruncatedProblem prob{model(4), lambda};
    const double h = 1e-8;
    for (double kink : {-1.0, 0.0}) {
      CHECK(std::fabs(prob.f(kink + h) - prob.f(kink)) <= 1e-6 * lambda);
      CHECK(std::fabs(prob.f(kink - h) - prob.f(kink)) <= 1e-6 * lambda);
    }
  }
}

TEST_CASE("primitive differentiates back to the source away from kinks") {
  const TruncatedProblem prob{model(4), 0.25};
  const double h = 1e-6;
  for (double t : {-3.0, -0.6, -0.2, 0.4, 1.3, 2.7}) {
    const double fd = (prob.F(t + h) - prob.F(t - h)) / (2.0 * h);
    CHECK(fd == doctest::Approx(prob.f(t)).epsilon(1e-6));
  }
}

TEST_CASE("piecewise derivative uses the right-derivative convention") {
  const TruncatedProblem prob{model(4), 0.3};
  CHECK(prob.df(-2.0) == 0.0);
  CHECK(prob.df(-1.0) == doctest::Approx(-0.3));  // right derivative at -1
  CHECK(prob.df(-0.5) == doctest::Approx(-0.3));
  CHECK(prob.df(0.0) == 0.0);  // right derivative of t^3 - lambda at 0
  CHECK(prob.df(2.0) == doctest::Approx(12.0));
  // q = 2 keeps the unit slope at the origin
  CHECK(TruncatedProblem{model(2.0), 0.0}.df(0.0) == doctest::Approx(1.0));
}

TEST_CASE("expression-backed nonlinearity matches the power model") {
  static constexpr std::string_view kT[] = {"t"};
  const Nonlinearity ex = Nonlinearity::from_expression(Expr::parse("t^3", kT), 4, 3.5, 3.5, 1);
  const Nonlinearity pw = model(4);
  for (double t : {0.01, 0.3, 1.0, 2.5, 7.9, 31.0, 500.0}) {
    CHECK(ex.f(t) == doctest::Approx(pw.f(t)).epsilon(1e-14));
    CHECK(ex.F(t) == doctest::Approx(pw.F(t)).epsilon(1e-12));
    CHECK(ex.df(t) == doctest::Approx(pw.df(t)).epsilon(1e-8));
  }
  CHECK(ex.F(0.0) == 0.0);
}

TEST_CASE("hypothesis validation on the worked examples") {
  const Mesh& m = mesh16();
  const ExponentField p2 = ExponentField::constant(m, 2.0);

  // q = 5, r = 4, theta = 4.5, t0 = 1: everything holds
  HypothesisReport rep =
      validate_hypotheses(Nonlinearity::power_model(5, 4, 4.5, 1), p2, 100.0);
  CHECK(rep.nonnegative);
  CHECK(rep.vanishing_at_zero);
  CHECK(rep.subcritical_growth);
  CHECK(rep.superlinear);
  CHECK(rep.exponent_ordering);
  CHECK(rep.pass());

  // theta = 4.5 > q = 4 breaks the superlinearity inequality
  rep = validate_hypotheses(Nonlinearity::power_model(4, 3.5, 4.5, 1), p2, 100.0);
  CHECK_FALSE(rep.superlinear);
  CHECK(rep.worst_ar_slack > 0.0);

  // r = 2 with p == 2 breaks the strict exponent ordering
  rep = validate_hypotheses(Nonlinearity::power_model(5, 2, 4.5, 1), p2, 100.0);
  CHECK_FALSE(rep.exponent_ordering);

  // r = q makes the near-origin ratio constant instead of vanishing
  rep = validate_hypotheses(Nonlinearity::power_model(4, 4, 3.5, 1), p2, 100.0);
  CHECK_FALSE(rep.vanishing_at_zero);
}

TEST_CASE("growth envelope constant") {
  CHECK(growth_envelope_constant(model(4), 3.5, 4.0, 1e12) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(growth_envelope_constant(Nonlinearity::zero(), 3.5, 4.0, 1e6) == 0.0);
  CHECK(growth_envelope_constant(Nonlinearity::power_model(5, 4, 4.5, 1), 4.0, 5.0, 1e12) ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("growth envelope bound holds for the truncated primitive") {
  // F_T(t) <= t^r/r + c1 t^q/q + lambda/2 on t > 0 and F_T <= lambda/2 on t <= 0
  for (double lambda : {0.01, 0.1, 0.5}) {
    const TruncatedProblem prob{Nonlinearity::power_model(5, 4, 4.5, 1), lambda};
    const double c1 = growth_envelope_constant(prob.base, 4.0, 5.0, 1e4);
    for (int i = 0; i < 10000; ++i) {
      const double t = -2.0 + 12.0 * i / 9999.0;
      if (t > 0.0) {
        const double bound = std::pow(t, 4.0) / 4.0 + c1 * std::pow(t, 5.0) / 5.0 + lambda / 2.0;
        CHECK(prob.F(t) <= bound + 1e-12 * std::max(1.0, bound));
      } else {
        CHECK(prob.F(t) <= lambda / 2.0 + 1e-15);
      }
    }
  }
}

TEST_CASE("truncated superlinearity constant M") {
  // the constant branch below -1 contributes theta*lambda/2
  ArReport rep = truncated_ar_constant(TruncatedProblem{model(5), 0.2}, 4.5, -10.0, 10.0);
  CHECK(rep.M == doctest::Approx(0.45).epsilon(1e-10));
  CHECK(rep.worst_t <= -1.0);

  // lambda = 0 with theta <= q: the supremum sits at zero
  rep = truncated_ar_constant(TruncatedProblem{model(5), 0.0}, 4.5, -2.0, 10.0);
  CHECK(rep.M == doctest::Approx(0.0).epsilon(1e-12));

  rep = truncated_ar_constant(TruncatedProblem{Nonlinearity::zero(), 0.0}, 4.5, -2.0, 10.0);
  CHECK(rep.M == 0.0);
}

TEST_CASE("M is stable against sampling density") {
  const TruncatedProblem prob{model(4), 0.37};
  const double coarse = truncated_ar_constant(prob, 3.5, -3.0, 8.0).M;
  const double fine = truncated_ar_constant(prob, 3.5, -3.0 - 1e-5, 8.0 + 1e-5).M;
  CHECK(std::fabs(coarse - fine) <= 1e-8);
}

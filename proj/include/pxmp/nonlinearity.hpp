#pragma once

#include <memory>

#include "pxmp/exponent.hpp"
#include "pxmp/expr.hpp"

namespace pxmp {

/// Continuous source nonlinearity f : [0, inf) -> [0, inf) with antiderivative
/// F (F(0) = 0) and growth/superlinearity parameters (q, r, theta, t0).
///
/// Two backends:
///  - the power model f(t) = t^{q-1} with closed-form F and f',
///  - an arbitrary parsed expression in t, with F computed by a cached
///    cumulative Gauss quadrature and f' by one-sided finite differences.
/// Copies share the backend; everything is safe to call concurrently.
class Nonlinearity {
 public:
  static Nonlinearity power_model(double q, double r, double theta, double t0);
  static Nonlinearity from_expression(Expr f_of_t, double q, double r, double theta, double t0);
  /// f == 0 (useful to drive error paths that need a sourceless problem).
  static Nonlinearity zero(double r = 3.5, double theta = 3.5, double t0 = 1.0);

  double f(double t) const;
  double F(double t) const;
  /// Right derivative of f (one-sided at t = 0).
  double df(double t) const;

  double growth_q() const { return q_; }
  double growth_r() const { return r_; }
  double ar_theta() const { return theta_; }
  double ar_t0() const { return t0_; }

  struct Backend;

 private:
  Nonlinearity(std::shared_ptr<const Backend> backend, double q, double r, double theta, double t0);
  std::shared_ptr<const Backend> backend_;
  double q_, r_, theta_, t0_;
};

/// The truncated problem (f, lambda): the source
///   f_T(t) = f(t) - lambda   for t > 0,
///          = -lambda (t + 1) for -1 <= t <= 0,
///          = 0               for t < -1,
/// is continuous on R; its primitive is closed-form piecewise with
/// F_T(0) = 0 and F_T == lambda/2 below -1.
struct TruncatedProblem {
  Nonlinearity base;
  double lambda = 0.0;

  double f(double t) const;
  double F(double t) const;
  /// Piecewise derivative of the truncated source; right derivative at the
  /// kinks t = -1 and t = 0.
  double df(double t) const;
};

/// Sampled validation of the standing hypotheses on f for a given exponent
/// field (log-spaced samples; no symbolic reasoning).
struct HypothesisReport {
  bool nonnegative = false;       // f(0) = 0 and f >= 0 on samples      (f1)
  bool vanishing_at_zero = false; // f(t)/t^{r-1} -> 0 as t -> 0+        (f2)
  bool subcritical_growth = false;// sup f(t)/t^{q-1} finite             (f3)
  bool superlinear = false;       // theta F(t) <= f(t) t on [t0, tmax]  (f4)
  bool exponent_ordering = false; // r > p+, q > p+, theta > p+
  double sup_growth_ratio = 0.0;  // realized sup of f(t)/t^{q-1}
  double worst_ar_slack = 0.0;    // max of theta F - f t over [t0, tmax]
  double ratio_at_origin = 0.0;   // f/t^{r-1} at the smallest sample
  bool pass() const {
    return nonnegative && vanishing_at_zero && subcritical_growth && superlinear &&
           exponent_ordering;
  }
};
HypothesisReport validate_hypotheses(const Nonlinearity& nl, const ExponentField& p, double t_max);

/// Smallest c1 >= 0 with f(t) <= t^{r-1} + c1 t^{q-1} on a log-spaced sample
/// of (0, t_max].
double growth_envelope_constant(const Nonlinearity& nl, double r, double q, double t_max);

/// The constant M of the truncated superlinearity inequality
/// theta F_T(t) <= f_T(t) t + M, as a sampled-and-refined supremum.
struct ArReport {
  double M = 0.0;
  double theta = 0.0;
  double worst_t = 0.0;
};
ArReport truncated_ar_constant(const TruncatedProblem& prob, double theta, double t_lo,
                               double t_hi);

}  // namespace pxmp

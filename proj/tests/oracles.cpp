#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace oracles {

namespace {

struct ShotResult {
  double first_zero = 0.0;  // x where u first returns to 0 (interpolated)
  std::vector<double> x, u, du;
};

// Integrate u'' = -g(u) from (0, slope) until u crosses zero from above
// or x exceeds x_max.
ShotResult shoot_once(const std::function<double(double)>& g, double slope, double x_max,
                      int steps_per_unit, bool record) {
  const double h = 1.0 / steps_per_unit;
  double x = 0.0, u = 0.0, w = slope;
  ShotResult out;
  if (record) {
    out.x.push_back(x);
    out.u.push_back(u);
    out.du.push_back(w);
  }
  double u_prev = u, x_prev = x;
  while (x < x_max) {
    // classical RK4 for (u, w)' = (w, -g(u))
    const double k1u = w, k1w = -g(u);
    const double k2u = w + 0.5 * h * k1w, k2w = -g(u + 0.5 * h * k1u);
    const double k3u = w + 0.5 * h * k2w, k3w = -g(u + 0.5 * h * k2u);
    const double k4u = w + h * k3w, k4w = -g(u + h * k3u);
    u_prev = u;
    x_prev = x;
    u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
    x += h;
    if (record) {
      out.x.push_back(x);
      out.u.push_back(u);
      out.du.push_back(w);
    }
    if (x > h && u <= 0.0) {  // first return to zero
      out.first_zero = x_prev + (x - x_prev) * (u_prev / (u_prev - u));
      return out;
    }
  }
  out.first_zero = x_max;
  return out;
}

}  // namespace

double ShootingSolution::operator()(double xq) const {
  if (xq <= 0.0) return 0.0;
  if (xq >= x.back()) return u.back();
  const double h = x[1] - x[0];
  const std::size_t i = std::min(static_cast<std::size_t>(xq / h), x.size() - 2);
  const double s = (xq - x[i]) / h;
  // cubic Hermite on [x_i, x_{i+1}]
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return h00 * u[i] + h10 * h * du[i] + h01 * u[i + 1] + h11 * h * du[i + 1];
}

double ShootingSolution::max() const {
  double m = 0.0;
  for (double v : u) m = std::max(m, v);
  return m;
}

ShootingSolution shoot_positive_solution(const std::function<double(double)>& g, double slope_lo,
                                         double slope_hi, int steps_per_unit) {
  // The first return is strictly decreasing in the slope for superlinear g.
  const auto first_zero = [&](double s) {
    return shoot_once(g, s, 2.0, steps_per_unit, false).first_zero;
  };
  if (!(first_zero(slope_lo) > 1.0) || !(first_zero(slope_hi) < 1.0)) {
    throw std::runtime_error("shooting bracket does not straddle the unit interval");
  }
  double lo = slope_lo, hi = slope_hi;
  for (int i = 0; i < 100 && (hi - lo) > 1e-14 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (first_zero(mid) > 1.0 ? lo : hi) = mid;
  }
  const double slope = 0.5 * (lo + hi);
  ShotResult shot = shoot_once(g, slope, 1.0, steps_per_unit, true);
  ShootingSolution sol;
  sol.slope = slope;
  sol.x = std::move(shot.x);
  sol.u = std::move(shot.u);
  sol.du = std::move(shot.du);
  return sol;
}

double torsion_exact(double x, double p, double lambda) {
  const double c = (p - 1.0) / p * std::pow(lambda, 1.0 / (p - 1.0));
  const double e = p / (p - 1.0);
  return c * (std::pow(std::fabs(x - 0.5), e) - std::pow(0.5, e));
}

namespace {

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double flm = f(0.5 * (a + m)), frm = f(0.5 * (m + b));
  const double left = simpson(a, m, fa, flm, fm);
  const double right = simpson(m, b, fm, frm, fb);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return adaptive(f, a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol * std::max(1.0, b - a),
                  48);
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi, int iters) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  if (!(flo * f(hi) < 0.0)) throw std::runtime_error("bisect_root: no sign change");
  for (int i = 0; i < iters && (hi - lo) > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (flo * fm < 0.0) {
      hi = mid;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracles

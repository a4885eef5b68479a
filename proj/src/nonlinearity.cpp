#include "pxmp/nonlinearity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "pxmp/errors.hpp"

namespace pxmp {

namespace {

// 12-point Gauss-Legendre rule on [-1, 1]; exact through degree 23.
constexpr std::array<double, 6> kGlNodes = {
    0.1252334085114689, 0.3678314989981802, 0.5873179542866175,
    0.7699026741943047, 0.9041172563704749, 0.9815606342467192,
};
constexpr std::array<double, 6> kGlWeights = {
    0.2491470458134028, 0.2334925365383548, 0.2031674267230659,
    0.1600783285433462, 0.1069393259953184, 0.0471753363865118,
};

template <class Fn>
double gauss12(const Fn& f, double a, double b) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < 6; ++i) {
    sum += kGlWeights[i] * (f(mid - half * kGlNodes[i]) + f(mid + half * kGlNodes[i]));
  }
  return half * sum;
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> t(n);
  const double ratio = std::log(hi / lo);
  for (int i = 0; i < n; ++i) t[i] = lo * std::exp(ratio * i / (n - 1));
  t.back() = hi;
  return t;
}

}  // namespace

struct Nonlinearity::Backend {
  virtual ~Backend() = default;
  virtual double f(double t) const = 0;
  virtual double F(double t) const = 0;
  virtual double df(double t) const = 0;
};

namespace {

struct ZeroBackend final : Nonlinearity::Backend {
  double f(double) const override { return 0.0; }
  double F(double) const override { return 0.0; }
  double df(double) const override { return 0.0; }
};

struct PowerBackend final : Nonlinearity::Backend {
  double q;
  explicit PowerBackend(double q_) : q(q_) {}
  double f(double t) const override { return t <= 0.0 ? 0.0 : std::pow(t, q - 1.0); }
  double F(double t) const override { return t <= 0.0 ? 0.0 : std::pow(t, q) / q; }
  double df(double t) const override {
    if (t < 0.0) return 0.0;
    return (q - 1.0) * std::pow(t, q - 2.0);  // q = 2 gives 1 at t = 0
  }
};

// Antiderivative of a parsed f by cumulative Gauss quadrature: prefix sums at
// fixed breakpoints (uniform up to 8, then octave-doubling), plus a partial
// 12-point rule on the remaining segment. The prefix table extends lazily
// under a mutex; everything else is read-only.
struct ExprBackend final : Nonlinearity::Backend {
  Expr fx;
  static constexpr double kStep = 0.125;
  static constexpr int kUniform = 64;  // breakpoints 0, 0.125, ..., 8
  mutable std::mutex mutex;
  mutable std::vector<double> prefix{0.0};  // prefix[i] = integral over [0, point(i)]

  explicit ExprBackend(Expr e) : fx(std::move(e)) {}

  static double point(int i) {
    return i <= kUniform ? i * kStep : 8.0 * std::pow(2.0, i - kUniform);
  }

  double f(double t) const override { return fx.eval(t); }

  double F(double t) const override {
    if (t <= 0.0) return 0.0;
    int idx;
    if (t <= 8.0) {
      idx = std::min(static_cast<int>(t / kStep), kUniform);
    } else {
      idx = kUniform + static_cast<int>(std::floor(std::log2(t / 8.0)));
    }
    double base;
    {
      std::lock_guard<std::mutex> lock(mutex);
      while (static_cast<int>(prefix.size()) <= idx) {
        const int k = static_cast<int>(prefix.size());
        prefix.push_back(prefix.back() +
                         gauss12([this](double s) { return fx.eval(s); }, point(k - 1), point(k)));
      }
      base = prefix[idx];
    }
    return base + gauss12([this](double s) { return fx.eval(s); }, point(idx), t);
  }

  double df(double t) const override {
    const double h = 6e-6 * std::max(1.0, std::fabs(t));
    if (t >= h) {
      return (fx.eval(t + h) - fx.eval(t - h)) / (2.0 * h);
    }
    // one-sided (right) second-order difference near the domain edge
    return (-3.0 * fx.eval(t) + 4.0 * fx.eval(t + h) - fx.eval(t + 2.0 * h)) / (2.0 * h);
  }
};

}  // namespace

Nonlinearity::Nonlinearity(std::shared_ptr<const Backend> backend, double q, double r, double theta,
                           double t0)
    : backend_(std::move(backend)), q_(q), r_(r), theta_(theta), t0_(t0) {
  if (!(q_ > 1.0) || !(r_ > 1.0) || !(theta_ > 1.0) || !(t0_ > 0.0)) {
    throw std::invalid_argument("nonlinearity parameters need q, r, theta > 1 and t0 > 0");
  }
}

Nonlinearity Nonlinearity::power_model(double q, double r, double theta, double t0) {
  return Nonlinearity(std::make_shared<PowerBackend>(q), q, r, theta, t0);
}

Nonlinearity Nonlinearity::from_expression(Expr f_of_t, double q, double r, double theta,
                                           double t0) {
  return Nonlinearity(std::make_shared<ExprBackend>(std::move(f_of_t)), q, r, theta, t0);
}

Nonlinearity Nonlinearity::zero(double r, double theta, double t0) {
  return Nonlinearity(std::make_shared<ZeroBackend>(), std::max(r, theta) + 1.0, r, theta, t0);
}

double Nonlinearity::f(double t) const { return backend_->f(t); }
double Nonlinearity::F(double t) const { return backend_->F(t); }
double Nonlinearity::df(double t) const { return backend_->df(t); }

double TruncatedProblem::f(double t) const {
  if (t > 0.0) return base.f(t) - lambda;
  if (t >= -1.0) return -lambda * (t + 1.0);
  return 0.0;
}

double TruncatedProblem::F(double t) const {
  if (t > 0.0) return base.F(t) - lambda * t;
  if (t >= -1.0) return -lambda * (0.5 * t * t + t);
  return 0.5 * lambda;
}

double TruncatedProblem::df(double t) const {
  if (t >= 0.0) return base.df(t);
  if (t >= -1.0) return -lambda;
  return 0.0;
}

HypothesisReport validate_hypotheses(const Nonlinearity& nl, const ExponentField& p,
                                     double t_max) {
  if (!(t_max > std::max(1.0, nl.ar_t0()))) {
    throw std::invalid_argument("validate_hypotheses needs t_max > max(1, t0)");
  }
  constexpr int kSamples = 10000;
  const double t_min = t_max * 1e-8;
  std::vector<double> t = log_spaced(t_min, t_max, kSamples);
  t.push_back(nl.ar_t0());
  std::sort(t.begin(), t.end());

  HypothesisReport rep;
  const double r = nl.growth_r(), q = nl.growth_q(), theta = nl.ar_theta(), t0 = nl.ar_t0();
  const double pmax = p.max_exponent();

  // (f1)
  rep.nonnegative = std::fabs(nl.f(0.0)) <= 1e-12;
  for (double ti : t) {
    const double fe = nl.f(ti);
    if (!(fe >= -1e-12 * std::max(1.0, std::fabs(fe)))) {
      rep.nonnegative = false;
      break;
    }
  }

  // (f2): the ratio f/t^{r-1} must decrease monotonically to 0 over the last
  // decade of samples near the origin, with a strict overall drop.
  {
    bool ok = true;
    double prev = -std::numeric_limits<double>::infinity();
    double top = 0.0;
    for (double ti : t) {
      if (ti > 10.0 * t_min) break;
      const double ratio = nl.f(ti) / std::pow(ti, r - 1.0);
      if (!std::isfinite(ratio) || ratio + 1e-9 * std::max(1.0, std::fabs(ratio)) < prev) {
        ok = false;
        break;
      }
      prev = ratio;
      top = ratio;
    }
    rep.ratio_at_origin = nl.f(t.front()) / std::pow(t.front(), r - 1.0);
    if (ok && !(rep.ratio_at_origin <= 0.9 * top + 1e-300)) ok = false;
    rep.vanishing_at_zero = ok;
  }

  // (f3)
  {
    double sup = 0.0;
    bool ok = true;
    for (double ti : t) {
      const double ratio = nl.f(ti) / std::pow(ti, q - 1.0);
      if (!std::isfinite(ratio)) {
        ok = false;
        break;
      }
      sup = std::max(sup, ratio);
    }
    rep.sup_growth_ratio = sup;
    rep.subcritical_growth = ok && std::isfinite(sup);
  }

  // (f4)
  {
    bool ok = true;
    double worst = -std::numeric_limits<double>::infinity();
    for (double ti : t) {
      if (ti < t0) continue;
      const double lhs = theta * nl.F(ti);
      const double rhs = nl.f(ti) * ti;
      worst = std::max(worst, lhs - rhs);
      if (!(lhs <= rhs + 1e-9 * std::max(1.0, std::fabs(rhs)))) ok = false;
    }
    rep.worst_ar_slack = worst;
    rep.superlinear = ok;
  }

  rep.exponent_ordering = r > pmax && q > pmax && theta > pmax;
  return rep;
}

double growth_envelope_constant(const Nonlinearity& nl, double r, double q, double t_max) {
  if (!(t_max > 0.0)) throw std::invalid_argument("growth_envelope_constant needs t_max > 0");
  constexpr int kSamples = 10000;
  const std::vector<double> t = log_spaced(t_max * 1e-8, t_max, kSamples);
  double c1 = 0.0;
  for (double ti : t) {
    const double excess = nl.f(ti) - std::pow(ti, r - 1.0);
    if (excess > 0.0) c1 = std::max(c1, excess / std::pow(ti, q - 1.0));
  }
  return c1;
}

namespace {

// golden-section maximization on [a, b] for a function unimodal there
template <class Fn>
std::pair<double, double> golden_max(const Fn& g, double a, double b) {
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double g1 = g(x1), g2 = g(x2);
  for (int i = 0; i < 120 && (b - a) > 1e-13 * std::max(1.0, std::fabs(a) + std::fabs(b)); ++i) {
    if (g1 < g2) {
      a = x1;
      x1 = x2;
      g1 = g2;
      x2 = a + kInvPhi * (b - a);
      g2 = g(x2);
    } else {
      b = x2;
      x2 = x1;
      g2 = g1;
      x1 = b - kInvPhi * (b - a);
      g1 = g(x1);
    }
  }
  const double xm = 0.5 * (a + b);
  return {xm, g(xm)};
}

}  // namespace

ArReport truncated_ar_constant(const TruncatedProblem& prob, double theta, double t_lo,
                               double t_hi) {
  if (!(theta > 1.0)) throw std::invalid_argument("truncated_ar_constant needs theta > 1");
  if (!(t_hi > t_lo)) throw std::invalid_argument("empty sample interval");
  const auto g = [&](double t) { return theta * prob.F(t) - prob.f(t) * t; };

  // 1e4 samples per unit plus the truncation kinks.
  const int n = std::clamp(static_cast<int>(std::ceil((t_hi - t_lo) * 1e4)), 1000, 2000000) + 1;
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = t_lo + (t_hi - t_lo) * i / (n - 1);
  for (double kink : {-1.0, 0.0}) {
    if (kink > t_lo && kink < t_hi) t.push_back(kink);
  }
  std::sort(t.begin(), t.end());

  double best = -std::numeric_limits<double>::infinity();
  double best_t = t.front();
  std::vector<double> gv(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    gv[i] = g(t[i]);
    if (gv[i] > best) {
      best = gv[i];
      best_t = t[i];
    }
  }
  // refine every interior local maximum of the sampled values
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    if (gv[i] >= gv[i - 1] && gv[i] >= gv[i + 1]) {
      auto [xm, gm] = golden_max(g, t[i - 1], t[i + 1]);
      if (gm > best) {
        best = gm;
        best_t = xm;
      }
    }
  }

  ArReport rep;
  rep.theta = theta;
  rep.worst_t = best_t;
  rep.M = std::max(0.0, best);
  return rep;
}

}  // namespace pxmp

#include "isospec/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "isospec/errors.hpp"
#include "isospec/ode.hpp"

namespace isospec {

namespace {

constexpr double kGolden = 0.6180339887498949;

template <class F>
std::pair<double, double> golden_min(F&& h, double a, double b, double tol) {
  double c = b - kGolden * (b - a), d = a + kGolden * (b - a);
  double fc = h(c), fd = h(d);
  for (int it = 0; it < 300 && b - a > tol; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = h(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = h(d);
    }
  }
  return fc <= fd ? std::pair{c, fc} : std::pair{d, fd};
}

double safe_eval(const MonotoneFn& f, double x) {
  try {
    return f(x);
  } catch (const PreconditionError&) {
    return NAN;
  }
}

// Grid minimization of h(log x) with golden-section refinement around the
// best local minima.
Extremum grid_minimize(const std::function<double(double)>& h, double lo, double hi,
                       const LegendreOptions& o) {
  auto xs = log_grid(lo, hi, o.per_decade, 3);
  std::vector<double> hv(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    hv[i] = h(xs[i]);
    if (std::isnan(hv[i])) hv[i] = INFINITY;
  }
  std::vector<std::size_t> minima;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    bool left = i == 0 || hv[i] <= hv[i - 1];
    bool right = i + 1 == xs.size() || hv[i] <= hv[i + 1];
    if (left && right && std::isfinite(hv[i])) minima.push_back(i);
  }
  std::sort(minima.begin(), minima.end(), [&](std::size_t a, std::size_t b) {
    return hv[a] < hv[b] || (hv[a] == hv[b] && a < b);
  });
  if (minima.size() > static_cast<std::size_t>(o.starts)) minima.resize(o.starts);
  Extremum best;
  best.searched = {lo, hi};
  best.value = INFINITY;
  for (std::size_t i : minima) {
    double val = hv[i], arg = xs[i];
    if (i > 0 && i + 1 < xs.size()) {
      auto [u, v] = golden_min([&](double u) { double r = h(std::exp(u)); return std::isnan(r) ? INFINITY : r; },
                               std::log(xs[i - 1]), std::log(xs[i + 1]), 1e-11);
      if (v < val) {
        val = v;
        arg = std::exp(u);
      }
    }
    if (val < best.value) {
      best.value = val;
      best.argmin = arg;
      best.at_edge = (i == 0 || i + 1 == xs.size()) && arg == xs[i];
    }
  }
  if (!std::isfinite(best.value)) {
    throw PreconditionError("extremum search: objective not finite anywhere on the window");
  }
  return best;
}

double step_integral(const StepFn& f, double a, double b) {
  double s = 0, x = a;
  double val = f(a);
  const auto& p = f.points();
  auto it = std::upper_bound(p.begin(), p.end(), a);
  for (; it != p.end() && *it < b; ++it) {
    s += val * (*it - x);
    x = *it;
    val = f.values()[it - p.begin()];
  }
  s += val * (b - x);
  return s;
}

template <class F>
double quad(F&& f, double a, double b, double tol = 1e-11) {
  if (b <= a) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, tol);
}

}  // namespace

Extremum legendre(const MonotoneFn& M, double t, const LegendreOptions& o) {
  if (!(t > 0)) throw PreconditionError("legendre: t must be positive");
  const StepFn* st = M.step_function();
  const bool constant_step = st && st->size() == 0;
  if (M.increasing() && !constant_step) {
    bool flat = st && std::all_of(st->values().begin(), st->values().end(),
                                  [&](double v) { return v == st->left_value(); });
    if (!flat) throw PreconditionError("legendre: M must be decreasing");
  }
  const double lo = std::max(o.lo, M.lo() > 0 ? M.lo() : o.lo);
  const double hi = std::min(o.hi, M.hi());
  if (!(lo < hi)) throw PreconditionError("legendre: empty search window");
  if (st) {
    // right-continuous decreasing step: the infimum sits at a jump point
    Extremum best;
    best.searched = {lo, hi};
    best.value = t * lo + (*st)(lo);
    best.argmin = lo;
    best.at_edge = true;
    const auto& p = st->points();
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] <= lo || p[i] > hi) continue;
      double v = t * p[i] + st->values()[i];
      if (v < best.value) {
        best.value = v;
        best.argmin = p[i];
        best.at_edge = false;
      }
    }
    if (best.value < 0) throw PreconditionError("legendre: M must be nonnegative");
    return best;
  }
  // admissibility on the grid: nonnegative and decreasing
  auto xs = log_grid(lo, hi, o.per_decade, 3);
  double prev = INFINITY;
  for (double x : xs) {
    double m = safe_eval(M, x);
    if (std::isnan(m)) continue;
    if (m < 0) {
      std::ostringstream os;
      os << "legendre: M must be positive, but M(" << x << ") = " << m;
      throw PreconditionError(os.str());
    }
    if (m > prev * (1 + 1e-12) + 1e-300) throw PreconditionError("legendre: M is not decreasing");
    prev = m;
  }
  return grid_minimize([&](double x) { return t * x + safe_eval(M, x); }, lo, hi, o);
}

Extremum legendre_conjugate(const MonotoneFn& G, double t, const LegendreOptions& o) {
  if (!(t > 0)) throw PreconditionError("legendre conjugate: t must be positive");
  if (!G.increasing()) throw PreconditionError("legendre conjugate: G must be increasing");
  const double lo = std::max(o.lo, G.lo() > 0 ? G.lo() : o.lo);
  const double hi = std::min(o.hi, G.hi());
  if (!(lo * 1e3 < hi)) throw PreconditionError("legendre conjugate: window too small");
  const double r_hi = safe_eval(G, hi) / hi, r_mid = safe_eval(G, hi / 1e3) / (hi / 1e3);
  if (!(r_hi <= 0.99 * r_mid)) {
    throw PreconditionError("legendre conjugate: G(x)/x does not decay on the window");
  }
  Extremum r;
  if (const StepFn* st = G.step_function()) {
    r.searched = {lo, hi};
    r.value = -t * lo + (*st)(lo);
    r.argmin = lo;
    const auto& p = st->points();
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] <= lo || p[i] > hi) continue;
      double v = -t * p[i] + st->values()[i];
      if (v > r.value) {
        r.value = v;
        r.argmin = p[i];
      }
    }
  } else {
    r = grid_minimize([&](double x) { return t * x - safe_eval(G, x); }, lo, hi, o);
    r.value = -r.value;
  }
  if (G.lo() == 0) {
    double g0 = safe_eval(G, 0.0);
    if (g0 > r.value) {
      r.value = g0;
      r.argmin = 0;
    }
  }
  if (r.argmin >= hi * (1 - 1e-9)) {
    throw PreconditionError("legendre conjugate: supremum not attained inside the window");
  }
  return r;
}

StepFn neg_log(const StepFn& F) {
  std::vector<double> v(F.values().size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = -std::log(F.values()[i]);
  return StepFn(-std::log(F.left_value()), F.points(), std::move(v));
}

SandwichResult laplace_sandwich_check(const StepFn& F, double t, double rel_tol) {
  if (!(t > 0)) throw PreconditionError("sandwich: t must be positive");
  if (F.monotonicity() != Monotonicity::increasing) {
    throw PreconditionError("sandwich: F must be increasing");
  }
  if (F.left_value() != 0) throw PreconditionError("sandwich: F(0) must be 0");
  if (F.size() == 0) throw PreconditionError("sandwich: F has no jumps");
  if (!(F.points().front() > 0)) throw PreconditionError("sandwich: F jumps at or below 0");
  if (F.values().back() > 1 + 1e-15) throw PreconditionError("sandwich: F exceeds 1");
  SandwichResult r;
  r.t = t;
  r.positive_near_zero = false;
  r.le = INFINITY;
  // Neumaier-compensated sum of exp(-t x_i) * jump_i
  double s = 0, comp = 0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    const double x = F.points()[i], fx = F.values()[i];
    if (fx > 0) r.le = std::min(r.le, t * x - std::log(fx));
    const double term = std::exp(-t * x) * F.jump(i);
    const double u = s + term;
    comp += std::abs(s) >= std::abs(term) ? (s - u) + term : (term - u) + s;
    s = u;
  }
  r.integral = s + comp;
  r.lower = std::exp(-r.le);
  r.upper = (1 + r.le) * std::exp(-r.le);
  r.pass = r.lower <= r.integral * (1 + rel_tol) && r.integral <= r.upper * (1 + rel_tol);
  return r;
}

double generalized_inverse(const MonotoneFn& L, double x) {
  if (L.increasing() && !(L.step_function() && L.step_function()->size() == 0)) {
    throw PreconditionError("generalized inverse: L must be decreasing");
  }
  return L.inverse(x);
}

double generalized_inverse(const StepFn& L, double x) {
  if (L.monotonicity() != Monotonicity::decreasing && L.size() > 0) {
    throw PreconditionError("generalized inverse: L must be decreasing");
  }
  return L.generalized_inverse(x);
}

nlohmann::json DoublingReport::to_json() const {
  return {{"window", {window.lo, window.hi}},
          {"probes", probes},
          {"c_estimate", c_estimate},
          {"last_decade_trend", last_decade_trend},
          {"pass", pass}};
}

DoublingReport doubling_check(const MonotoneFn& L, Window w, int probes, double threshold,
                              double trend_tolerance) {
  if (!(w.lo > 0) || !(w.hi > 2 * w.lo)) throw PreconditionError("doubling: bad window");
  DoublingReport r;
  r.window = w;
  const double a = w.lo, b = w.hi / 2;
  std::vector<double> xs(probes), lr(probes);
  r.c_estimate = INFINITY;
  for (int k = 0; k < probes; ++k) {
    xs[k] = a * std::pow(b / a, probes == 1 ? 0.0 : static_cast<double>(k) / (probes - 1));
    double l1 = L.log_value(xs[k]), l2 = L.log_value(2 * xs[k]);
    lr[k] = (l1 == l2) ? 0.0 : l2 - l1;  // covers equal infinities
    r.c_estimate = std::min(r.c_estimate, std::exp(lr[k]));
  }
  r.probes = probes;
  // least-squares slope of log ratio against log10 x on the last decade
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (int k = 0; k < probes; ++k) {
    if (xs[k] < b / 10) continue;
    double u = std::log10(xs[k]);
    sx += u;
    sy += lr[k];
    sxx += u * u;
    sxy += u * lr[k];
    ++n;
  }
  if (n >= 2 && sxx * n - sx * sx > 0) {
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    r.last_decade_trend = std::exp(slope);
  }
  r.pass = r.c_estimate >= threshold && r.last_decade_trend >= 1 - trend_tolerance;
  return r;
}

MonotoneFn compose_exp(const MonotoneFn& L) {
  const double lo = L.lo() > 0 ? std::log(L.lo()) : -745.0;
  const double hi = std::isfinite(L.hi()) ? std::log(L.hi()) : INFINITY;
  std::string name = L.name().empty() ? "" : L.name() + " o exp";
  if (L.kind() == MonotoneFn::Kind::expression) {
    return MonotoneFn::expression(expr::compose(L.expression(), expr::exp(expr::var())),
                                  L.monotonicity(), lo, hi, name);
  }
  return MonotoneFn::callable([L](double s) { return L(std::exp(s)); }, L.monotonicity(), lo, hi,
                              name, [L](double s) { return L.log_value(std::exp(s)); });
}

MonotoneFn smooth(const MonotoneFn& L) {
  if (L.increasing() && !(L.step_function() && L.step_function()->size() == 0)) {
    throw PreconditionError("smooth: L must be decreasing");
  }
  std::function<double(double)> f;
  if (const StepFn* st = L.step_function()) {
    StepFn s = *st;
    f = [s](double x) { return 2.0 / x * step_integral(s, x / 2, x); };
  } else {
    f = [L](double x) { return 2.0 / x * quad([&](double s) { return L(s); }, x / 2, x, 1e-10); };
  }
  return MonotoneFn::callable(f, Monotonicity::decreasing, 2 * L.lo(), L.hi(),
                              L.name().empty() ? "smoothed" : "smoothed " + L.name());
}

MonotoneFn rescale_profile(const MonotoneFn& L1, double alpha, double beta) {
  if (!(alpha > 0) || !(beta > 0)) throw PreconditionError("rescale: alpha, beta must be positive");
  const double lo = std::pow(L1.lo(), alpha), hi = std::pow(L1.hi(), alpha);
  if (L1.kind() == MonotoneFn::Kind::expression) {
    auto e = expr::mul(expr::constant(alpha * beta),
                       expr::compose(L1.expression(), expr::pow(expr::var(), 1 / alpha)));
    return MonotoneFn::expression(e, L1.monotonicity(), lo, hi);
  }
  return MonotoneFn::callable(
      [L1, alpha, beta](double y) { return alpha * beta * L1(std::pow(y, 1 / alpha)); },
      L1.monotonicity(), lo, hi);
}

std::vector<double> octave_grid(double t_min, double t_max, int per_octave) {
  std::vector<double> t{0.0};
  for (int k = 0;; ++k) {
    double x = t_min * std::exp2(static_cast<double>(k) / per_octave);
    if (x > t_max * (1 + 1e-12)) break;
    t.push_back(x);
  }
  return t;
}

FunctionalSolution solve_functional_equation(const MonotoneFn& L, std::span<const double> times,
                                             const FunctionalOptions& o) {
  if (L.increasing()) throw PreconditionError("functional equation: L must be decreasing");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0 || (i > 0 && times[i] < times[i - 1])) {
      throw PreconditionError("functional equation: times must be nonnegative and sorted");
    }
  }
  FunctionalSolution sol;
  sol.g = compose_exp(L);
  const MonotoneFn& g = sol.g;
  auto gval = [&](double s) { return std::exp(g.log_value(s)); };
  auto inv_g = [&](double s) {
    double lv = g.log_value(s);
    return lv == INFINITY ? 0.0 : std::exp(-lv);
  };
  double t0 = 0, v0 = 0;
  if (!(std::isfinite(gval(0.0)) && gval(0.0) > 0)) {
    v0 = o.start_v;
    t0 = quad(inv_g, 0.0, v0);
  }
  sol.ode_start_t = t0;
  sol.ode_start_v = v0;
  double rtol = o.rtol;
  for (int attempt = 0;; ++attempt) {
    sol.t.assign(times.begin(), times.end());
    sol.v.assign(times.size(), 0.0);
    std::vector<double> ode_times{t0};
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (times[i] <= t0) {
        // start-up stretch: invert the quadrature by bisection
        double a = 0, b = v0;
        for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
          double m = 0.5 * (a + b);
          (quad(inv_g, 0.0, m) < times[i] ? a : b) = m;
        }
        sol.v[i] = times[i] == 0 ? 0.0 : 0.5 * (a + b);
      } else {
        ode_times.push_back(times[i]);
      }
    }
    if (ode_times.size() > 1) {
      OdeOptions oo;
      oo.rtol = rtol;
      auto ode = integrate_ode([&](double, double v) { return gval(v); }, v0, ode_times, oo);
      std::size_t k = 1;
      for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] > t0) sol.v[i] = ode.y[k++];
      }
    }
    // a-posteriori residual via cumulative quadrature
    sol.max_residual = 0;
    double acc = 0, prev_v = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      acc += quad(inv_g, prev_v, sol.v[i]);
      prev_v = sol.v[i];
      if (times[i] > 0) {
        sol.max_residual = std::max(sol.max_residual, std::abs(acc - times[i]) / times[i]);
      }
    }
    sol.refinements = attempt;
    if (sol.max_residual <= o.residual_tol) return sol;
    if (attempt >= o.max_refinements) {
      throw InvariantError("functional equation: residual " + std::to_string(sol.max_residual) +
                           " above tolerance after refinement");
    }
    rtol = std::max(rtol / 10, 1e-13);
  }
}

nlohmann::json FunctionalInvariants::to_json() const {
  return {{"subadditive", subadditive},   {"ratio_decreasing", ratio_decreasing},
          {"lower_sandwich", lower_sandwich}, {"D", D},
          {"C_doubling", C_doubling},     {"D_within_2C", D_within_2C},
          {"checked", checked}};
}

FunctionalInvariants functional_equation_invariants(const FunctionalSolution& sol, double tol,
                                                    bool strict) {
  FunctionalInvariants r;
  const auto& t = sol.t;
  const auto& v = sol.v;
  auto g = [&](double s) { return std::exp(sol.g.log_value(s)); };
  double prev_ratio = INFINITY;
  std::ostringstream why;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] <= 0) continue;
    ++r.checked;
    auto it = std::lower_bound(t.begin(), t.end(), 2 * t[i] * (1 - 1e-12));
    if (it != t.end() && std::abs(*it - 2 * t[i]) <= 1e-12 * t[i]) {
      double v2 = v[it - t.begin()];
      if (v2 > 2 * v[i] * (1 + tol)) {
        r.subadditive = false;
        why << "v(2t) > 2v(t) at t=" << t[i] << "; ";
      }
    }
    const double ratio = v[i] / t[i];
    if (ratio > prev_ratio * (1 + tol)) {
      r.ratio_decreasing = false;
      why << "v/t increases at t=" << t[i] << "; ";
    }
    prev_ratio = ratio;
    const double gv = g(v[i]);
    if (gv > ratio * (1 + tol)) {
      r.lower_sandwich = false;
      why << "g(v(t)) > v/t at t=" << t[i] << "; ";
    }
    r.D = std::max(r.D, ratio / gv);
    if (v[i] > 0) r.C_doubling = std::max(r.C_doubling, g(v[i] / 2) / gv);
  }
  r.D_within_2C = r.D <= 2 * r.C_doubling * (1 + tol);
  if (!r.D_within_2C) why << "D = " << r.D << " exceeds 2C = " << 2 * r.C_doubling << "; ";
  if (strict && !r.all()) throw InvariantError("functional equation invariants: " + why.str());
  return r;
}

GammaSolution profile_gamma(const MonotoneFn& Lambda, std::span<const double> times,
                                      const FunctionalOptions& o) {
  if (Lambda.increasing()) throw PreconditionError("gamma: Lambda must be decreasing");
  auto lam = [&](double v) { return std::exp(Lambda.log_value(v)); };
  auto integrand = [&](double v) {
    double lv = Lambda.log_value(v);
    return lv == INFINITY ? 0.0 : std::exp(-lv) / v;
  };
  double t0 = 0, y0 = 1;
  if (!std::isfinite(lam(1.0))) {
    y0 = std::exp(o.start_v);
    t0 = quad(integrand, 1.0, y0);
  }
  GammaSolution r;
  r.t.assign(times.begin(), times.end());
  r.gamma.assign(times.size(), 1.0);
  std::vector<double> ode_times{t0};
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] <= t0) {
      double a = 1, b = y0;
      for (int it = 0; it < 200 && b - a > 1e-16 * b; ++it) {
        double m = 0.5 * (a + b);
        (quad(integrand, 1.0, m) < times[i] ? a : b) = m;
      }
      r.gamma[i] = times[i] == 0 ? 1.0 : 0.5 * (a + b);
    } else {
      ode_times.push_back(times[i]);
    }
  }
  if (ode_times.size() > 1) {
    OdeOptions oo;
    oo.rtol = o.rtol;
    oo.atol = 0;
    auto ode = integrate_ode([&](double, double y) { return lam(y) * y; }, y0, ode_times, oo);
    std::size_t k = 1;
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (times[i] > t0) r.gamma[i] = ode.y[k++];
    }
  }
  auto fe = solve_functional_equation(Lambda, times, o);
  for (std::size_t i = 0; i < times.size(); ++i) {
    double ev = std::exp(fe.v[i]);
    if (std::isfinite(ev)) r.alignment = std::max(r.alignment, std::abs(r.gamma[i] / ev - 1));
  }
  return r;
}

MonotoneFn conjugate_bound(const MonotoneFn& G, ConjugateClause clause, Window w, double eps) {
  if (!G.increasing()) throw PreconditionError("bounds: G must be increasing");
  if (!(eps > 0 && eps < 1)) throw PreconditionError("bounds: eps must lie in (0, 1)");
  if (!(w.lo > 0) || !(w.hi > w.lo * 1e3)) throw PreconditionError("bounds: bad window");
  // G(x)/x must decrease to 0 on the window
  auto ratio = MonotoneFn::callable([G](double x) { return G(x) / x; }, Monotonicity::decreasing,
                                    w.lo, w.hi, "G/id",
                                    [G](double x) { return G.log_value(x) - std::log(x); });
  auto xs = log_grid(w.lo, w.hi, 16, 3);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (ratio.log_value(xs[i]) > ratio.log_value(xs[i - 1]) + 1e-12) {
      throw PreconditionError("bounds: G(x)/x is not decreasing on the window");
    }
  }
  if (!(ratio(w.hi) <= 0.99 * ratio(w.hi / 1e3))) {
    throw PreconditionError("bounds: G(x)/x does not decay on the window");
  }
  const double lam_lo = ratio(w.hi) * (1 + 1e-9), lam_hi = ratio(w.lo) * (1 - 1e-9);
  switch (clause) {
    case ConjugateClause::upper:
      return MonotoneFn::callable([G, ratio](double l) { return G(ratio.inverse(l)); },
                                  Monotonicity::decreasing, lam_lo, lam_hi, "G o (G/id)^-1");
    case ConjugateClause::conjugate: {
      LegendreOptions lo;
      lo.lo = w.lo;
      lo.hi = w.hi;
      return MonotoneFn::callable(
          [G, lo](double l) { return legendre_conjugate(G, l, lo).value; },
          Monotonicity::decreasing, lam_lo, lam_hi, "Le*_G");
    }
    case ConjugateClause::conjugate_lower:
      return MonotoneFn::callable(
          [G, ratio, eps](double l) { return (1 - eps) * G(ratio.inverse(l / eps)); },
          Monotonicity::decreasing, eps * lam_lo, eps * lam_hi,
          "(1-eps) G o (G/id)^-1(./eps)");
  }
  throw PreconditionError("bounds: unknown clause");
}

// ---------------------------------------------------------------------------

namespace {

StepFn random_decreasing_step(std::mt19937_64& rng, double x0, double x1) {
  std::uniform_real_distribution<double> u(0, 1);
  int n = 5 + static_cast<int>(rng() % 20);
  std::vector<double> p(n), v(n);
  for (auto& x : p) x = x0 * std::pow(x1 / x0, u(rng));
  std::sort(p.begin(), p.end());
  p.erase(std::unique(p.begin(), p.end()), p.end());
  v.resize(p.size());
  double level = 1.0;
  for (auto& y : v) {
    level *= 0.3 + 0.6 * u(rng);
    y = level;
  }
  return StepFn(1.5, p, v);
}

// inf{v : L(v) <= x} by scanning the definition on the jump points
double scan_inverse(const StepFn& L, double x) {
  if (L.left_value() <= x) return 0.0;
  for (std::size_t i = 0; i < L.size(); ++i) {
    if (L(L.points()[i]) <= x) return L.points()[i];
  }
  return INFINITY;
}

}  // namespace

std::vector<CheckItem> inverse_calculus_checks() {
  using namespace expr;
  std::vector<CheckItem> out;
  const Window big{10, 1e12};

  {  // (1) doubling of f o exp implies doubling of f
    std::vector<std::pair<std::string, MonotoneFn>> fs{
        {"log(v)^-2", MonotoneFn::expression(pow(log(var()), -2), Monotonicity::decreasing,
                                             1.0001, INFINITY)},
        {"log(v)^-1", MonotoneFn::expression(pow(log(var()), -1), Monotonicity::decreasing,
                                             1.0001, INFINITY)},
        {"log(log(v))^-2", MonotoneFn::expression(pow(log(log(var())), -2),
                                                  Monotonicity::decreasing, 3, INFINITY)}};
    bool ok = true;
    std::ostringstream d;
    for (auto& [name, f] : fs) {
      auto fe = doubling_check(compose_exp(f), {std::log(big.lo), std::log(big.hi)});
      auto fd = doubling_check(f, big);
      d << name << ": c(f o exp)=" << fe.c_estimate << " c(f)=" << fd.c_estimate << "; ";
      if (fe.pass && !fd.pass) ok = false;
    }
    out.push_back({"doubling inheritance", ok, d.str()});
  }
  {  // (2) (f o l)^-1 = l^-1 o f^-1
    auto f = MonotoneFn::expression(pow(var(), -2), Monotonicity::decreasing, 1e-300, INFINITY);
    auto l = MonotoneFn::expression(exp(var()), Monotonicity::increasing, -700, 700);
    auto fl = f.compose(l);
    auto fl_numeric = MonotoneFn::callable([fl](double x) { return fl(x); },
                                           Monotonicity::decreasing, 1e-9, 700);
    double err = 0;
    for (double lam : log_grid(1e-6, 1e-1, 10)) {
      double lhs = fl.inverse(lam), lhs2 = fl_numeric.inverse(lam);
      double rhs = std::log(f.inverse(lam));
      err = std::max({err, std::abs(lhs - rhs), std::abs(lhs2 - rhs) / rhs});
    }
    // step f: the inverse of f o exp is the log of the inverse of f
    std::mt19937_64 rng(7);
    for (int k = 0; k < 50; ++k) {
      StepFn s = random_decreasing_step(rng, 1.5, 1e6);
      std::vector<double> lp(s.points());
      for (auto& x : lp) x = std::log(x);
      StepFn se(s.left_value(), lp, s.values());
      for (double lam : {0.9, 0.5, 0.1, 0.01, 1e-3}) {
        double a, b;
        try {
          a = se.generalized_inverse(lam);
          b = std::log(s.generalized_inverse(lam));
        } catch (const PreconditionError&) {
          continue;
        }
        if (a != 0 || b > 0) err = std::max(err, std::abs(a - b));
      }
    }
    std::ostringstream d;
    d << "max deviation " << err;
    out.push_back({"composition rule", err < 1e-9, d.str()});
  }
  {  // (4) f <= g near infinity gives f^-1 <= g^-1 near zero
    auto f = MonotoneFn::expression(mul(constant(2), pow(var(), -1)), Monotonicity::decreasing,
                                    1e-300, INFINITY);
    auto g = MonotoneFn::expression(pow(var(), -0.5), Monotonicity::decreasing, 1e-300, INFINITY);
    auto fwd = preceq(log_of(f), log_of(g), Direction::near_infinity, {1e2, 1e6});
    auto fi = *f.analytic_inverse();
    auto gi = *g.analytic_inverse();
    auto inv = preceq(log_of(fi), log_of(gi), Direction::near_zero, {1e-4, 1e-2});
    std::ostringstream d;
    d << "f<=g: " << fwd.holds << " (C=" << fwd.C << ", D=" << fwd.D
      << "), f^-1<=g^-1: " << inv.holds << " (C=" << inv.C << ", D=" << inv.D << ")";
    out.push_back({"order reversal", !fwd.holds || inv.holds, d.str()});
  }
  {  // (5) f <= D g gives f^-1(l) <= g^-1(l / D), on random step pairs
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    int bad = 0, tested = 0;
    for (int k = 0; k < 200; ++k) {
      StepFn g = random_decreasing_step(rng, 1.5, 1e6);
      const double D = 1 + 9 * u(rng);
      // f = D g scaled down pointwise by a random factor in (0, 1], kept monotone
      std::vector<double> fv(g.values());
      double shrink = 1.0;
      for (auto& y : fv) {
        shrink *= 0.8 + 0.2 * u(rng);
        y *= D * shrink;
      }
      StepFn f(D * g.left_value(), g.points(), fv);
      for (double lam : {0.5, 0.1, 0.03, 0.01, 1e-3}) {
        double a = scan_inverse(f, lam), b = scan_inverse(g, lam / D);
        if (!std::isfinite(b)) continue;
        ++tested;
        if (a > b) ++bad;
        if (a != f.generalized_inverse(lam)) ++bad;
      }
    }
    std::ostringstream d;
    d << tested << " probes, " << bad << " violations";
    out.push_back({"constant absorption", bad == 0 && tested > 0, d.str()});
  }
  {  // (6) f ~ g, both doubling: f^-1 ~ g^-1 dilatationally near zero
    auto f = MonotoneFn::expression(mul(constant(3), pow(log(var()), -2)),
                                    Monotonicity::decreasing, 1.0001, INFINITY);
    auto g = MonotoneFn::expression(pow(log(var()), -2), Monotonicity::decreasing, 1.0001,
                                    INFINITY);
    auto eq = simeq(log_of(f), log_of(g), Direction::near_infinity, {1e2, 1e8});
    ComparisonOptions dil;
    dil.dilatational = true;
    auto fi = *f.analytic_inverse();
    auto gi = *g.analytic_inverse();
    auto inv = simeq(log_of(fi), log_of(gi), Direction::near_zero, {1e-4, 1e-1}, dil);
    std::ostringstream d;
    d << "f~g: " << eq.holds << ", inverses dilatationally: " << inv.holds << " (D=" << inv.D
      << ")";
    out.push_back({"dilatational inverses", eq.holds && inv.holds, d.str()});
  }
  return out;
}

}  // namespace isospec

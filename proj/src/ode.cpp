#include "isospec/ode.hpp"

#include <algorithm>
#include <cmath>

#include "isospec/errors.hpp"

namespace isospec {

namespace {

// Dormand-Prince tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

OdeSolution integrate_ode(const std::function<double(double, double)>& f, double y0,
                          std::span<const double> times, const OdeOptions& o) {
  if (times.empty()) throw PreconditionError("ode: no output times");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] >= times[i - 1])) throw PreconditionError("ode: times must be increasing");
  }
  OdeSolution sol;
  double t = times[0], y = y0;
  double k1 = f(t, y);
  if (!std::isfinite(k1)) throw PreconditionError("ode: derivative not finite at the start");
  const double span = times.back() - t;
  double h = o.initial_step > 0 ? o.initial_step
                                : std::min(span > 0 ? span : 1.0,
                                           0.01 * (std::abs(y) + 1e-3) / (std::abs(k1) + 1e-12));
  h = std::max(h, 1e-12 * std::max(1.0, span));
  sol.t.push_back(t);
  sol.y.push_back(y);
  for (std::size_t next = 1; next < times.size(); ++next) {
    const double target = times[next];
    while (t < target) {
      if (sol.steps + sol.rejected >= o.max_steps) {
        throw ConvergenceError("ode: step budget exhausted", t);
      }
      bool last = false;
      double step = h;
      if (t + step >= target) {
        step = target - t;
        last = true;
      }
      const double k2 = f(t + c2 * step, y + step * a21 * k1);
      const double k3 = f(t + c3 * step, y + step * (a31 * k1 + a32 * k2));
      const double k4 = f(t + c4 * step, y + step * (a41 * k1 + a42 * k2 + a43 * k3));
      const double k5 =
          f(t + c5 * step, y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const double k6 =
          f(t + step, y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const double y5 = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const double k7 = f(t + step, y5);
      const double err =
          step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const double scale = o.atol + o.rtol * std::max(std::abs(y), std::abs(y5));
      double ratio = std::abs(err) / scale;
      if (!std::isfinite(ratio) || !std::isfinite(y5)) ratio = 1e10;
      if (ratio <= 1.0) {
        t = last ? target : t + step;
        y = y5;
        k1 = k7;
        ++sol.steps;
        double fac = ratio == 0 ? 5.0 : std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 5.0);
        if (!last) h = step * fac;
        else h = std::max(h, step * fac);
      } else {
        ++sol.rejected;
        h = step * std::clamp(0.9 * std::pow(ratio, -0.2), 0.1, 0.5);
        if (h < 1e-15 * std::max(1.0, std::abs(t))) {
          throw ConvergenceError("ode: step size underflow", t);
        }
      }
    }
    sol.t.push_back(target);
    sol.y.push_back(y);
  }
  return sol;
}

}  // namespace isospec

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace isospec {

struct OdeOptions {
  double rtol = 1e-9;
  double atol = 1e-14;
  double initial_step = 0;  // 0: chosen from the first derivative
  std::size_t max_steps = 5'000'000;
};

struct OdeSolution {
  std::vector<double> t, y;  // y at each requested time
  std::size_t steps = 0, rejected = 0;
};

/// Scalar y' = f(t, y) by Dormand-Prince 5(4) with step-size control.
/// `times` is increasing; integration starts at times[0] with value y0 and
/// lands exactly on every requested time. Throws ConvergenceError when the
/// step budget runs out or the step size underflows.
OdeSolution integrate_ode(const std::function<double(double, double)>& f, double y0,
                          std::span<const double> times, const OdeOptions& options = {});

}  // namespace isospec

#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "isospec/comparison.hpp"
#include "isospec/monotone_fn.hpp"
#include "isospec/step_fn.hpp"

namespace isospec {

struct LegendreOptions {
  /// Search window for x; the infimum over x > 0 is taken on this window.
  double lo = 1e-12, hi = 1e12;
  int per_decade = 64;
  int starts = 8;  // golden-section refinements around the best local minima
  double rel_tol = 1e-9;
};

struct Extremum {
  double value = 0;
  double argmin = 0;  // argmax for the conjugate
  Window searched;
  bool at_edge = false;
};

/// inf{t x + M(x) : x > 0} for decreasing M >= 0. Step functions are
/// minimized exactly over their jump points.
Extremum legendre(const MonotoneFn& M, double t, const LegendreOptions& options = {});
/// sup{-t x + G(x) : x >= 0} for increasing G with G(x)/x -> 0.
Extremum legendre_conjugate(const MonotoneFn& G, double t, const LegendreOptions& options = {});

/// x -> -log F(x), with +inf where F vanishes.
StepFn neg_log(const StepFn& F);

struct SandwichResult {
  double t = 0;
  double le = 0;  // Le_M(t) for M = -log F
  double lower = 0, integral = 0, upper = 0;
  bool pass = false;
  /// F(x) > 0 for every x > 0; false for any finite spectrum with a gap.
  bool positive_near_zero = false;
};

/// exp(-Le_M(t)) <= int exp(-t x) dF(x) <= (1 + Le_M(t)) exp(-Le_M(t)),
/// the integral summed exactly over the jumps.
SandwichResult laplace_sandwich_check(const StepFn& F, double t, double rel_tol = 1e-12);

/// inf{v > 0 : L(v) <= x} for decreasing L.
double generalized_inverse(const MonotoneFn& L, double x);
double generalized_inverse(const StepFn& L, double x);

struct DoublingReport {
  Window window;
  std::size_t probes = 0;
  double c_estimate = 0;     // min of L(2x)/L(x) over the probes
  double last_decade_trend = 1;  // fitted factor per decade of L(2x)/L(x) on the last decade
  bool pass = false;
  nlohmann::json to_json() const;
};

/// Finite-window diagnostic for L(2x) >= c L(x).
DoublingReport doubling_check(const MonotoneFn& L, Window w, int probes = 200,
                              double threshold = 1e-6, double trend_tolerance = 0.05);

/// x -> L(exp(x)).
MonotoneFn compose_exp(const MonotoneFn& L);

/// L_ct(x) = (2/x) int_{x/2}^x L(s) ds on [2 lo, hi]; exact on step
/// functions, adaptive Gauss-Kronrod otherwise.
MonotoneFn smooth(const MonotoneFn& L);

/// L2 with L2(exp(x)) = alpha beta L1(exp(x / alpha)).
MonotoneFn rescale_profile(const MonotoneFn& L1, double alpha, double beta);

struct FunctionalOptions {
  double rtol = 1e-9;
  double residual_tol = 1e-6;
  int max_refinements = 3;
  /// Where L(exp(0)) is infinite the first stretch [0, start_v] is taken
  /// from the quadrature instead of the ODE.
  double start_v = 1e-3;
};

struct FunctionalSolution {
  std::vector<double> t, v;
  double max_residual = 0;  // max |t - int_0^{v(t)} ds / L(e^s)| / t
  double ode_start_t = 0, ode_start_v = 0;
  int refinements = 0;
  MonotoneFn g;  // L o exp
};

/// v with t = int_0^{v(t)} ds / (L o exp)(s), via v' = (L o exp)(v), v(0) = 0.
/// Throws InvariantError when the residual check keeps failing.
FunctionalSolution solve_functional_equation(const MonotoneFn& L, std::span<const double> times,
                                             const FunctionalOptions& options = {});
/// {0} followed by t_min 2^{k / per_octave} up to t_max.
std::vector<double> octave_grid(double t_min, double t_max, int per_octave = 8);

struct FunctionalInvariants {
  bool subadditive = true;       // v(2t) <= 2 v(t)
  bool ratio_decreasing = true;  // v(t) / t nonincreasing
  bool lower_sandwich = true;    // g(v(t)) <= v(t) / t
  double D = 0;                  // max (v/t) / g(v)
  double C_doubling = 0;         // max g(v/2) / g(v) over the solution range
  bool D_within_2C = true;
  std::size_t checked = 0;
  bool all() const { return subadditive && ratio_decreasing && lower_sandwich && D_within_2C; }
  nlohmann::json to_json() const;
};

/// Throws InvariantError on a violation when `strict`.
FunctionalInvariants functional_equation_invariants(const FunctionalSolution& sol,
                                                    double tol = 1e-7, bool strict = true);

struct GammaSolution {
  std::vector<double> t, gamma;
  double alignment = 0;  // max |gamma / exp(v) - 1| against the functional solver
};

/// gamma with t = int_1^{gamma(t)} dv / (Lambda(v) v), from gamma' = Lambda(gamma) gamma.
GammaSolution profile_gamma(const MonotoneFn& Lambda, std::span<const double> times,
                                      const FunctionalOptions& options = {});

enum class ConjugateClause { upper, conjugate, conjugate_lower };

/// Bounds on M in terms of increasing G with G(x)/x -> 0, as functions of
/// lambda on the image of G/id over `window`:
///   upper:           G((G/id)^{-1}(lambda))
///   conjugate:       Le*_G(lambda)
///   conjugate_lower: (1 - eps) G((G/id)^{-1}(lambda / eps))
MonotoneFn conjugate_bound(const MonotoneFn& G, ConjugateClause clause, Window window,
                        double eps = 0.5);

struct CheckItem {
  std::string clause;
  bool pass = false;
  std::string detail;
};

/// Rules for generalized inverses on catalogue and sampled pairs: doubling
/// inheritance, composition, order reversal, constant absorption and
/// dilatational equivalence of inverses.
std::vector<CheckItem> inverse_calculus_checks();

}  // namespace isospec

#include <doctest.h>

#include <cmath>

#include "isospec/errors.hpp"
#include "isospec/transforms.hpp"

using namespace isospec;

namespace {

MonotoneFn power(double p, double lo = 1e-300, double hi = 1e300) {
  return MonotoneFn::expression(expr::pow(expr::var(), p),
                                p < 0 ? Monotonicity::decreasing : Monotonicity::increasing, lo, hi);
}

}  // namespace

TEST_CASE("Legendre transform of x^-a") {
  // inf_x t x + x^-a is attained at x = (a / t)^(1 / (a + 1))
  for (double a : {0.5, 1.0, 2.0}) {
    auto M = power(-a);
    for (double t : {0.01, 1.0, 100.0}) {
      auto e = legendre(M, t);
      double x = std::pow(a / t, 1 / (a + 1));
      CHECK(e.value == doctest::Approx(t * x + std::pow(x, -a)).epsilon(1e-8));
      CHECK(e.argmin == doctest::Approx(x).epsilon(1e-4));
      CHECK_FALSE(e.at_edge);
    }
  }
}

TEST_CASE("Legendre transform of a step function is a minimum over jumps") {
  StepFn M(INFINITY, {0.1, 0.5, 2.0}, {3.0, 1.0, 0.2});
  auto f = MonotoneFn::step(M, 1e-6, 10);
  for (double t : {0.1, 1.0, 10.0}) {
    double want = std::min({0.1 * t + 3.0, 0.5 * t + 1.0, 2.0 * t + 0.2});
    CHECK(legendre(f, t).value == doctest::Approx(want));
  }
}

TEST_CASE("conjugate of sqrt") {
  // sup_x -t x + sqrt(x) = 1 / (4 t)
  auto G = power(0.5, 0, 1e300);
  for (double t : {0.01, 0.5, 3.0}) CHECK(legendre_conjugate(G, t).value == doctest::Approx(1 / (4 * t)).epsilon(1e-8));
}

TEST_CASE("sandwich holds on a single atom and flags positivity") {
  StepFn F(0, {0.5}, {0.3});
  auto r = laplace_sandwich_check(F, 2.0);
  CHECK(r.pass);
  CHECK(r.le == doctest::Approx(1.0 - std::log(0.3)));
  CHECK(r.integral == doctest::Approx(0.3 * std::exp(-1.0)));
  CHECK_FALSE(r.positive_near_zero);
  CHECK_THROWS_AS(laplace_sandwich_check(StepFn(0, {0.0}, {1.0}), 1.0), PreconditionError);
}

TEST_CASE("doubling check separates powers from exponentials") {
  auto p = doubling_check(power(-2, 1e-3, 1e6), {1, 1e4});
  CHECK(p.pass);
  CHECK(p.c_estimate == doctest::Approx(0.25).epsilon(1e-6));
  auto e = doubling_check(MonotoneFn::expression(expr::exp(expr::neg(expr::var())), Monotonicity::decreasing,
                                                 0, 1e6),
                          {1, 1e3});
  CHECK_FALSE(e.pass);
}

TEST_CASE("smoothing a power law") {
  // (2/x) int_{x/2}^x s^-p ds
  double p = 2;
  auto L = smooth(power(-p, 1e-3, 1e6));
  for (double x : {0.1, 1.0, 50.0}) {
    double want = 2 / x * (std::pow(x, 1 - p) - std::pow(x / 2, 1 - p)) / (1 - p);
    CHECK(L(x) == doctest::Approx(want).epsilon(1e-8));
  }
}

TEST_CASE("functional equation for v^-2/d has v = (d/2) log(1 + 2t/d)") {
  auto times = octave_grid(1e-2, 1e3, 4);
  for (double d : {1.0, 2.0, 5.0}) {
    auto sol = solve_functional_equation(power(-2 / d), times);
    for (std::size_t i = 0; i < sol.t.size(); ++i) {
      CHECK(sol.v[i] == doctest::Approx(d / 2 * std::log1p(2 * sol.t[i] / d)).epsilon(1e-7));
    }
    auto inv = functional_equation_invariants(sol);
    CHECK(inv.all());
    CHECK(inv.D <= 2 * inv.C_doubling + 1e-9);
  }
}

TEST_CASE("gamma agrees with exp of the functional solution") {
  auto times = octave_grid(1e-1, 1e2, 4);
  auto g = profile_gamma(power(-1, 1, 1e300), times);
  CHECK(g.alignment < 1e-6);
  // gamma' = gamma / gamma = 1 from gamma(0) = 1 gives gamma = 1 + t
  for (std::size_t i = 0; i < g.t.size(); ++i) CHECK(g.gamma[i] == doctest::Approx(1 + g.t[i]).epsilon(1e-7));
}

TEST_CASE("rescaled profile follows its defining identity") {
  auto L1 = power(-1, 1e-6, 1e12);
  auto L2 = rescale_profile(L1, 2.0, 3.0);
  for (double x : {0.5, 2.0, 8.0}) CHECK(L2(std::exp(x)) == doctest::Approx(6.0 * L1(std::exp(x / 2))));
}

TEST_CASE("generalized inverse of decreasing functions") {
  auto L = power(-2, 1, 1e6);
  CHECK(generalized_inverse(L, 0.01) == doctest::Approx(10));
  CHECK_THROWS_AS(generalized_inverse(power(2, 1, 10), 4), PreconditionError);
}

TEST_CASE("inverse calculus rules") {
  for (const auto& c : inverse_calculus_checks()) {
    INFO(c.clause << ": " << c.detail);
    CHECK(c.pass);
  }
}

TEST_CASE("conjugate bounds for sqrt") {
  auto G = power(0.5, 0, 1e300);
  Window w{1e-2, 1e2};
  auto up = conjugate_bound(G, ConjugateClause::upper, w);
  auto conj = conjugate_bound(G, ConjugateClause::conjugate, w);
  auto low = conjugate_bound(G, ConjugateClause::conjugate_lower, w);
  // for sqrt: upper 1 / l, conjugate 1 / 4l, and with eps = 1/2 the lower
  // clause meets the conjugate
  for (double l : {0.2, 0.5, 1.0, 2.5}) {
    CHECK(up(l) == doctest::Approx(1 / l).epsilon(1e-8));
    CHECK(conj(l) == doctest::Approx(1 / (4 * l)).epsilon(1e-8));
    CHECK(low(l) == doctest::Approx(1 / (4 * l)).epsilon(1e-8));
  }
  // at l = 8 the maximiser 1 / (4 l^2) lies left of the window, so the sup sits at its edge
  CHECK(conj(8.0) == doctest::Approx(-8 * 1e-2 + 0.1).epsilon(1e-8));
}

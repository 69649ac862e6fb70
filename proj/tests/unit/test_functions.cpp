#include <doctest.h>

#include <cmath>

#include "isospec/comparison.hpp"
#include "isospec/errors.hpp"
#include "isospec/monotone_fn.hpp"
#include "isospec/ode.hpp"
#include "isospec/step_fn.hpp"

using namespace isospec;

TEST_CASE("counting function merges equal samples and is right-continuous") {
  auto F = StepFn::counting({0.5, 0.1, 0.5, 0.9});
  CHECK(F.size() == 3);
  CHECK(F(0.0) == 0);
  CHECK(F(0.1) == doctest::Approx(0.25));
  CHECK(F(0.5) == doctest::Approx(0.75));
  CHECK(F.left_limit(0.5) == doctest::Approx(0.25));
  CHECK(F.jump(1) == doctest::Approx(0.5));
  CHECK(F(2.0) == doctest::Approx(1.0));
}

TEST_CASE("generalized inverse of a decreasing step function") {
  StepFn L(1.0, {1, 2, 4}, {0.5, 0.25, 0.1});
  CHECK(L.monotonicity() == Monotonicity::decreasing);
  CHECK(L.generalized_inverse(0.3) == 2);
  CHECK(L.generalized_inverse(0.25) == 2);
  CHECK(L.generalized_inverse(0.5) == 1);
  CHECK_THROWS_AS(L.generalized_inverse(0.01), PreconditionError);
}

TEST_CASE("stieltjes sums over the jumps in the closed interval") {
  auto F = StepFn::counting({1, 2, 3});
  double s = F.stieltjes([](double x) { return x * x; }, 1, 2);
  CHECK(s == doctest::Approx((1.0 + 4.0) / 3));
}

TEST_CASE("step function json round trip") {
  StepFn L(1.0, {1, 2, 4}, {0.5, 0.25, 0.1});
  auto M = StepFn::from_json(L.to_json());
  CHECK(M.points() == L.points());
  CHECK(M.values() == L.values());
  CHECK(M.left_value() == L.left_value());
}

TEST_CASE("log-space evaluation of towers") {
  using namespace expr;
  auto e = exp(exp(var()));
  auto s = eval_log(e, 10.0);
  CHECK(s.sign == 1);
  CHECK(s.log_abs == doctest::Approx(std::exp(10.0)));
  // log of a value whose log overflows a double
  auto t = log(log(log(iterate_exp(var(), 3))));
  CHECK(eval(t, 800.0) == doctest::Approx(800.0));
  auto small = exp(neg(pow(var(), -0.5)));
  CHECK(eval_log(small, 1e-8).log_abs == doctest::Approx(-1e4));
}

TEST_CASE("expression derivative against a central difference") {
  using namespace expr;
  auto e = mul(pow(var(), 1.5), log(add(var(), constant(2))));
  for (double x : {0.3, 1.0, 7.0}) {
    double h = 1e-6 * x;
    double fd = (eval(e, x + h) - eval(e, x - h)) / (2 * h);
    CHECK(derivative(e, x) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("analytic inverse of an invertible chain") {
  using namespace expr;
  auto e = exp(mul(constant(2), pow(var(), 0.5)));
  auto inv = invert(e);
  REQUIRE(inv);
  for (double x : {0.1, 2.0, 30.0}) CHECK(eval(*inv, eval(e, x)) == doctest::Approx(x));
  CHECK_FALSE(invert(add(var(), exp(var()))).has_value());
}

TEST_CASE("expression json round trip") {
  using namespace expr;
  auto e = div(log(var()), log(log(var())));
  auto f = from_json(to_json(e));
  CHECK(eval(f, 100.0) == doctest::Approx(eval(e, 100.0)));
  CHECK(to_string(f) == to_string(e));
}

TEST_CASE("monotone function inverse by bisection matches the closed form") {
  using namespace expr;
  auto f = MonotoneFn::expression(add(var(), exp(var())), Monotonicity::increasing, 0, 50);
  for (double y : {1.5, 10.0, 1e6}) {
    double x = f.inverse(y);
    CHECK(x + std::exp(x) == doctest::Approx(y).epsilon(1e-9));
  }
  auto g = MonotoneFn::expression(pow(var(), -2), Monotonicity::decreasing, 1, 1e6);
  CHECK(g.inverse(0.25) == doctest::Approx(2));
  CHECK_THROWS_AS(g.inverse(1e-20), PreconditionError);
}

TEST_CASE("sampled functions interpolate in log-log") {
  auto f = MonotoneFn::sampled({1, 100}, {1, 1e-4});
  CHECK(f(10) == doctest::Approx(1e-2));
  CHECK_FALSE(f.increasing());
}

TEST_CASE("preceq finds the constant for scaled power laws") {
  ComparisonOptions o;
  auto rep = preceq([](double x) { return std::log(3 * x * x); }, [](double x) { return std::log(x * x); },
                    Direction::near_zero, {1e-4, 1e-1}, o);
  CHECK(rep.holds);
  CHECK(rep.C * rep.D * rep.D >= 3 * (1 - 1e-9));
}

TEST_CASE("dilatational simeq of stretched exponentials") {
  ComparisonOptions o;
  o.dilatational = true;
  auto rep = simeq([](double x) { return -1 / x; }, [](double x) { return -2 / x; },
                   Direction::near_zero, {1e-3, 1e-1}, o);
  CHECK(rep.holds);
  CHECK(rep.D == doctest::Approx(2).epsilon(0.05));
  // exp(-1/x) <= exp(-1/(Dx)^2) needs x >= 1/D^2, which fails near 1e-4 once D <= 10
  o.d_lo = 0.1;
  o.d_hi = 10;
  auto no = simeq([](double x) { return -1 / x; }, [](double x) { return -1 / (x * x); },
                  Direction::near_zero, {1e-4, 1e-1}, o);
  CHECK_FALSE(no.holds);
  CHECK(no.refutation_x.has_value());
}

TEST_CASE("log grid end points and density") {
  auto g = log_grid(1e-3, 1, 10);
  CHECK(g.front() == 1e-3);
  CHECK(g.back() == 1);
  CHECK(g.size() == 31);
}

TEST_CASE("ode solver against closed forms") {
  std::vector<double> ts{0, 0.5, 1, 2, 5};
  auto sol = integrate_ode([](double, double y) { return -2 * y; }, 1, ts);
  for (std::size_t i = 0; i < ts.size(); ++i) CHECK(sol.y[i] == doctest::Approx(std::exp(-2 * ts[i])).epsilon(1e-8));
  // y' = exp(-y), y(0) = 0 has y = log(1 + t)
  auto s2 = integrate_ode([](double, double y) { return std::exp(-y); }, 0, ts);
  for (std::size_t i = 0; i < ts.size(); ++i) CHECK(s2.y[i] == doctest::Approx(std::log1p(ts[i])).epsilon(1e-8));
}

TEST_CASE("ode solver reports a blown step budget") {
  OdeOptions o;
  o.max_steps = 3;
  std::vector<double> ts{0, 100};
  CHECK_THROWS_AS(integrate_ode([](double t, double) { return std::sin(50 * t); }, 0, ts, o),
                  ConvergenceError);
}

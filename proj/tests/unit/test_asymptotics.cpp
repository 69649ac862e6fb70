#include <doctest.h>

#include <cmath>

#include "isospec/asymptotics.hpp"
#include "isospec/errors.hpp"

using namespace isospec;

TEST_CASE("fits recover exact exponents") {
  std::vector<double> x, yp, ys, yl;
  for (double v = 10; v <= 1e4; v *= 1.5) {
    x.push_back(v);
    yp.push_back(3 * std::pow(v, -0.75));
    ys.push_back(std::exp(-2 * std::pow(v, 0.4)));
    yl.push_back(5 * std::pow(std::log(v), 1.5));
  }
  auto p = fit_exponent(x, yp, FitModel::power);
  CHECK(p.exponent == doctest::Approx(-0.75).epsilon(1e-10));
  CHECK(std::exp(p.intercept) == doctest::Approx(3).epsilon(1e-9));
  CHECK(p.residual < 1e-10);
  CHECK(fit_exponent(x, ys, FitModel::stretched_exp).exponent == doctest::Approx(0.4).epsilon(1e-10));
  CHECK(fit_exponent(x, yl, FitModel::log_power).exponent == doctest::Approx(1.5).epsilon(1e-10));
  CHECK_THROWS_AS(fit_exponent(std::vector<double>{1, 10}, std::vector<double>{1, 2}, FitModel::power),
                  PreconditionError);
  CHECK(fit_model_from_string(to_string(FitModel::log_power)) == FitModel::log_power);
}

TEST_CASE("polynomial template rows") {
  for (double d : {1.0, 2.0, 4.0}) {
    auto t = asymptotic_template(1, d);
    // p ~ t^-d/2, N ~ lambda^d/2, Lambda ~ v^-2/d, Fo ~ r^d
    CHECK(expr::eval(t.p, 100.0) == doctest::Approx(std::pow(100.0, -d / 2)));
    CHECK(expr::eval(t.N, 0.01) == doctest::Approx(std::pow(0.01, d / 2)));
    CHECK(expr::eval(t.Lambda, 1e3) == doctest::Approx(std::pow(1e3, -2 / d)));
    CHECK(expr::eval(t.Folner, 7.0) == doctest::Approx(std::pow(7.0, d)));
  }
}

TEST_CASE("every catalogued template is self-consistent") {
  auto cat = template_catalogue();
  CHECK(cat.size() >= 6);
  for (const auto& t : cat) {
    INFO("row " << t.row << " " << t.family);
    auto r = template_self_consistency(t);
    CHECK(r.holds);
    CHECK(r.D <= 10);
    CHECK_NOTHROW(t.to_json());
  }
}

TEST_CASE("largest region respects the cap") {
  Group Z2(GroupSpec::free_abelian(2));
  auto reg = largest_region(srw_measure(Z2, Z2.standard_generators()), 1000);
  CHECK(reg.elements.size() <= 1000);
  CHECK(reg.elements.size() == 31 * 31);
}

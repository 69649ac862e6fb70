#include <doctest.h>

#include <cmath>
#include <random>

#include "isospec/errors.hpp"
#include "isospec/lamp_box.hpp"
#include "isospec/spectral.hpp"
#include "isospec/walk.hpp"

using namespace isospec;

namespace {

std::vector<Element> interval(const Group& G, int n) {
  std::vector<Element> out;
  for (std::int64_t i = 0; i < n; ++i) out.push_back(G.make_vector(std::vector<std::int64_t>{i}));
  return out;
}

Measure srw(const Group& G) { return srw_measure(G, G.standard_generators()); }

}  // namespace

TEST_CASE("interval spectrum is 1 - cos(pi j / (n + 1))") {
  Group Z(GroupSpec::free_abelian(1));
  const int n = 40;
  auto s = spectrum(DirichletOperator(srw(Z), interval(Z, n)));
  REQUIRE(s.eigenvalues.size() == std::size_t(n));
  for (int j = 1; j <= n; ++j) {
    double want = 2 * std::pow(std::sin(M_PI * j / (2.0 * (n + 1))), 2);
    CHECK(s.eigenvalues[j - 1] == doctest::Approx(want).epsilon(1e-11));
  }
}

TEST_CASE("sparse lambda_1 beyond the dense cap") {
  Group Z(GroupSpec::free_abelian(1));
  const int n = 6000;
  auto l = lambda1(DirichletOperator(srw(Z), interval(Z, n)), 4000);
  CHECK(l.method == "lanczos");
  double want = 2 * std::pow(std::sin(M_PI / (2.0 * (n + 1))), 2);
  CHECK(l.value == doctest::Approx(want).epsilon(1e-8));
}

TEST_CASE("square spectrum is the sum of two interval spectra") {
  Group Z2(GroupSpec::free_abelian(2));
  const int n = 9;
  std::vector<Element> sq;
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j) sq.push_back(Z2.make_vector(std::vector<std::int64_t>{i, j}));
  auto s = spectrum(DirichletOperator(srw(Z2), sq));
  std::vector<double> want;
  for (int a = 1; a <= n; ++a)
    for (int b = 1; b <= n; ++b)
      want.push_back(1 - (std::cos(M_PI * a / (n + 1)) + std::cos(M_PI * b / (n + 1))) / 2);
  std::sort(want.begin(), want.end());
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(s.eigenvalues[i] == doctest::Approx(want[i]).epsilon(1e-10));
}

TEST_CASE("duplicate or empty regions are rejected") {
  Group Z(GroupSpec::free_abelian(1));
  auto el = interval(Z, 3);
  el.push_back(el[1]);
  CHECK_THROWS_AS(DirichletOperator(srw(Z), el), PreconditionError);
  CHECK_THROWS_AS(DirichletOperator(srw(Z), {}), PreconditionError);
}

TEST_CASE("killed walk and trace moments against matrix powers") {
  Group H(GroupSpec::heisenberg());
  auto mu = srw(H);
  auto ball = make_ball(H, H.standard_generators(), 3);
  DirichletOperator op(mu, ball.elements());
  auto s = spectrum(op);
  ReturnOptions ro;
  ro.mode = Arithmetic::exact;
  auto p = return_probability(mu, 18, ro);
  Eigen::MatrixXd K = Eigen::MatrixXd::Identity(op.size(), op.size()) - Eigen::MatrixXd(op.matrix());
  for (int t : {1, 2, 5, 9}) {
    auto m = moment_consistency(op, s, t);
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(op.size(), op.size());
    for (int k = 0; k < 2 * t; ++k) P = P * K;
    CHECK(m.killed == doctest::Approx(P(op.identity_index(), op.identity_index())).epsilon(1e-10));
    CHECK(m.trace == doctest::Approx(P.trace() / op.size()).epsilon(1e-10));
    // killing only removes paths
    CHECK(m.killed <= p.exact[2 * t].get_d() + 1e-15);
  }
  // paths of length 2 never leave the ball of radius 3
  CHECK(moment_consistency(op, s, 1).killed == doctest::Approx(p.exact[2].get_d()).epsilon(1e-14));
}

TEST_CASE("esd counts with the eigenvalue tolerance") {
  auto e = esd_from_eigenvalues({0.1, 0.2, 0.2, 0.7});
  CHECK(e(0.05) == 0);
  CHECK(e(0.2) == doctest::Approx(0.75));
  CHECK(e(0.2 - 1e-14) == doctest::Approx(0.75));
  CHECK(e(1.0) == doctest::Approx(1.0));
  double lap = stieltjes_integral([](double x) { return std::exp(-x); }, e.as_step(), 0, 1);
  CHECK(lap == doctest::Approx((std::exp(-0.1) + 2 * std::exp(-0.2) + std::exp(-0.7)) / 4).epsilon(1e-10));
}

TEST_CASE("two tails on diagonal matrices") {
  // with eigenvalues x of A, lhs counts 1 - x^2 <= lambda
  std::vector<double> x{-0.95, -0.3, 0.0, 0.5, 0.99};
  auto r = two_tails_from_eigenvalues(x, 0.2);
  CHECK(r.status == TwoTails::holds);
  CHECK(r.lhs <= r.rhs);
}

TEST_CASE("two tails never fails on random symmetric contractions") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int k = 0; k < 30; ++k) {
    int n = 5 + k;
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = g(rng);
    a /= a.norm();
    for (double l : {0.01, 0.3, 0.9}) CHECK(two_tails_check(a, l).status != TwoTails::fails);
  }
}

TEST_CASE("lamp box blocks reproduce the explicit operator") {
  for (int q : {2, 3}) {
    Group W(GroupSpec::wreath(GroupSpec::cyclic(q), 1));
    auto mu = srw(W);
    for (int m : {1, 2, 4}) {
      LampBox box(mu, m);
      auto blocks = box.spectrum(false);
      auto dense = spectrum(DirichletOperator(mu, box.elements()), 100000);
      std::vector<double> expanded;
      for (std::size_t i = 0; i < blocks.eigenvalues.size(); ++i)
        for (std::size_t k = 0; k < static_cast<std::size_t>(std::llround(blocks.weights[i])); ++k)
          expanded.push_back(blocks.eigenvalues[i]);
      std::sort(expanded.begin(), expanded.end());
      REQUIRE(expanded.size() == dense.eigenvalues.size());
      for (std::size_t i = 0; i < expanded.size(); ++i) {
        CHECK(expanded[i] == doctest::Approx(dense.eigenvalues[i]).epsilon(1e-10));
      }
      CHECK(box.lambda1() == doctest::Approx(dense.lambda1).epsilon(1e-10));
      CHECK(LampBox::lambda1(mu, m) == doctest::Approx(dense.lambda1).epsilon(1e-10));
    }
  }
}

TEST_CASE("parallel and serial lamp box spectra are identical") {
  Group W(GroupSpec::wreath(GroupSpec::cyclic(2), 1));
  LampBox box(srw(W), 10);
  auto a = box.spectrum(false), b = box.spectrum(true);
  CHECK(a.eigenvalues == b.eigenvalues);
  CHECK(a.weights == b.weights);
}

TEST_CASE("lamp box refuses measures outside the block structure") {
  Group W(GroupSpec::wreath(GroupSpec::free_abelian(1), 1));
  CHECK_THROWS_AS(LampBox(srw(W), 3), PreconditionError);
}

TEST_CASE("compare_measures on identical measures needs no dilation") {
  Group Z(GroupSpec::free_abelian(1));
  auto reps = compare_measures(srw(Z), srw(Z), {interval(Z, 200)}, {1e-3, 1e-1});
  REQUIRE(reps.size() == 1);
  CHECK(reps[0].holds);
  CHECK(reps[0].D == doctest::Approx(1));
}

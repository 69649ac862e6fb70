#include <doctest.h>

#include <cmath>

#include "isospec/errors.hpp"
#include "isospec/isoperimetry.hpp"
#include "isospec/spectral.hpp"
#include "isospec/walk.hpp"

using namespace isospec;

namespace {

Measure srw(const Group& G) { return srw_measure(G, G.standard_generators()); }

}  // namespace

TEST_CASE("fixed polyomino counts") {
  Group Z2(GroupSpec::free_abelian(2));
  auto S = Z2.standard_generators();
  // fixed polyominoes, 1..9 cells
  const std::size_t want[] = {1, 2, 6, 19, 63, 216, 760, 2725, 9910};
  std::vector<std::size_t> count(10, 0);
  enumerate_connected(
      Z2, S.elements, 9,
      [&](const std::vector<Element>& s) {
        ++count[s.size()];
        return true;
      },
      true);
  for (int k = 1; k <= 9; ++k) CHECK(count[k] == want[k - 1]);
}

TEST_CASE("profile of Z is attained by intervals") {
  Group Z(GroupSpec::free_abelian(1));
  auto est = profile_bruteforce(srw(Z), 8);
  for (const auto& p : est.points) {
    REQUIRE(p.exact);
    CHECK(*p.exact == doctest::Approx(1 - std::cos(M_PI / (p.v + 1))).epsilon(1e-10));
  }
}

TEST_CASE("connected search agrees with the unrestricted search") {
  Group Z2(GroupSpec::free_abelian(2));
  auto a = profile_bruteforce(srw(Z2), 5);
  std::vector<Element> box;
  for (std::int64_t i = -2; i <= 2; ++i)
    for (std::int64_t j = -2; j <= 2; ++j) box.push_back(Z2.make_vector(std::vector<std::int64_t>{i, j}));
  auto b = profile_bruteforce_unrestricted(srw(Z2), 5, box);
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(*a.points[i].exact == doctest::Approx(*b.points[i].exact).epsilon(1e-12));
  }
}

TEST_CASE("profile is nonincreasing and candidate bounds dominate it") {
  Group Z2(GroupSpec::free_abelian(2));
  auto mu = srw(Z2);
  auto exact = profile_bruteforce(mu, 8);
  std::vector<std::size_t> grid{1, 2, 4, 8};
  auto cand = profile_candidates(mu, grid);
  for (std::size_t i = 1; i < exact.points.size(); ++i) {
    CHECK(*exact.points[i].exact <= *exact.points[i - 1].exact + 1e-15);
  }
  for (const auto& p : cand.points) {
    REQUIRE(p.upper);
    CHECK(*p.upper >= *exact.points[p.v - 1].exact - 1e-12);
  }
}

TEST_CASE("Cheeger bound on a 3x3 square") {
  Group Z2(GroupSpec::free_abelian(2));
  auto S = Z2.standard_generators();
  std::vector<Element> sq;
  for (std::int64_t i = 0; i < 3; ++i)
    for (std::int64_t j = 0; j < 3; ++j) sq.push_back(Z2.make_vector(std::vector<std::int64_t>{i, j}));
  auto b = cheeger_lower(Z2, S, sq);
  // the whole square: 12 boundary points over 9 cells is beaten by a 2x3
  // corner block with 4 of its 10 outer neighbours inside the square
  CHECK(b.exhaustive);
  CHECK(b.h == doctest::Approx(0.8));
  CHECK(b.value == doctest::Approx(0.02));
  double l1 = lambda1(DirichletOperator(srw(Z2), sq)).value;
  CHECK(l1 == doctest::Approx(1 - std::cos(M_PI / 4)).epsilon(1e-10));
  CHECK(l1 >= b.value);
}

TEST_CASE("Folner function of Z is 2r + 1") {
  Group Z(GroupSpec::free_abelian(1));
  auto S = Z.standard_generators();
  std::vector<int> radii{1, 2, 3, 6, 10, 40};
  auto v = folner_function(Z, S, radii);
  for (std::size_t i = 0; i < radii.size(); ++i) CHECK(v[i].value == std::size_t(2 * radii[i] + 1));
  CHECK(v[0].exact);
  CHECK_FALSE(v.back().exact);
}

TEST_CASE("Folner function of Z^2 at small radii") {
  Group Z2(GroupSpec::free_abelian(2));
  auto S = Z2.standard_generators();
  std::vector<int> radii{1};
  // a plus-shaped 5-set has 8 outer neighbours; the 2x3 block has 10 over 6
  auto v = folner_function(Z2, S, radii);
  CHECK(v[0].value == 5);
  CHECK(v[0].exact);
}

TEST_CASE("ball lower bound needs the ball to reach r / 4|S|") {
  Group Z(GroupSpec::free_abelian(1));
  auto ball = make_ball(Z, Z.standard_generators(), 2);
  CHECK(ball_folner_lower(ball, 8).value == 2);  // ceil(|B(1)| / 2) = ceil(3 / 2)
  CHECK_THROWS_AS(ball_folner_lower(ball, 40), PreconditionError);
}

TEST_CASE("wreath couples satisfy their conditions") {
  Group W(GroupSpec::wreath(GroupSpec::cyclic(2), 1));
  auto mu = srw(W);
  std::vector<FolnerCouple> cs;
  for (int n = 1; n <= 3; ++n) {
    auto c = folner_couple(mu, n);
    CHECK(c.distance_measured);
    CHECK(c.distance >= n);
    CHECK(c.outer_size <= c.C * c.inner_size);
    CHECK(c.alpha == doctest::Approx(c.lambda1 * n * n));
    cs.push_back(c);
  }
  auto t = n_lower_from_couples(cs);
  CHECK(t.accepted);
}

TEST_CASE("squaring condition separates exponential from polynomial growth") {
  // log F(Cr) >= 2 log F(r): F = exp(r) needs C >= 2, F = exp(r^3) needs C^3 >= 2
  auto lin = squaring_condition([](double r) { return r; }, 1, 100);
  CHECK(lin.pass);
  CHECK(lin.C == doctest::Approx(2.0));
  auto cube = squaring_condition([](double r) { return r * r * r; }, 1, 100);
  CHECK(cube.pass);
  CHECK(cube.C == doctest::Approx(1.3));
  // F = r would need C >= r
  auto poly = squaring_condition([](double r) { return std::log(r); }, 1, 100);
  CHECK_FALSE(poly.pass);
}

TEST_CASE("growth template is a minorant of the ball bound") {
  Group W(GroupSpec::wreath(GroupSpec::cyclic(2), 1));
  auto S = W.standard_generators();
  auto ball = make_ball(W, S, 8);
  auto g = folner_growth_template(ball);
  CHECK(g.kappa > 0);
  for (int r = 4 * int(S.size()); r <= 8 * 4 * int(S.size()); r += 4 * int(S.size())) {
    CHECK(g.F(r) <= ball_folner_lower(ball, r).value + 1e-9);
  }
}

#include <doctest.h>

#include <random>

#include <gmpxx.h>
#include <omp.h>

#include "isospec/errors.hpp"
#include "isospec/group.hpp"
#include "isospec/walk.hpp"

using namespace isospec;

namespace {

mpq_class binom_over_4t(unsigned t) {
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), 2 * t, t);
  mpz_class d = 1;
  d <<= 2 * t;
  mpq_class q(b, d);
  q.canonicalize();
  return q;
}

std::vector<GroupSpec> specs() {
  return {GroupSpec::free_abelian(1),
          GroupSpec::free_abelian(3),
          GroupSpec::heisenberg(),
          GroupSpec::cyclic(5),
          GroupSpec::wreath(GroupSpec::cyclic(3), 1),
          GroupSpec::wreath(GroupSpec::free_abelian(1), 1),
          GroupSpec::wreath(GroupSpec::cyclic(2), 2),
          GroupSpec::iterated_wreath(2, 2)};
}

Element vec(const Group& G, std::vector<std::int64_t> x) { return G.make_vector(x); }

}  // namespace

TEST_CASE("group axioms on random words") {
  std::mt19937_64 rng(3);
  for (const auto& spec : specs()) {
    Group G(spec);
    auto S = G.standard_generators();
    REQUIRE(S.symmetric);
    std::uniform_int_distribution<std::size_t> pick(0, S.size() - 1);
    auto word = [&] {
      std::vector<Element> w;
      for (int i = 0; i < 12; ++i) w.push_back(S.elements[pick(rng)]);
      return G.evaluate_word(w);
    };
    for (int k = 0; k < 20; ++k) {
      Element a = word(), b = word(), c = word();
      CHECK(G.multiply(G.multiply(a, b), c) == G.multiply(a, G.multiply(b, c)));
      CHECK(G.is_identity(G.multiply(a, G.inverse(a))));
      CHECK(G.multiply(G.identity(), a) == a);
      CHECK(G.element_from_json(G.element_to_json(a)) == a);
    }
    CHECK(group_spec_from_json(to_json(spec)) == spec);
  }
}

TEST_CASE("invalid group specs are rejected") {
  CHECK_THROWS_AS(group_spec_from_json({{"family", "free_abelian"}}), PreconditionError);
  CHECK_THROWS_AS(group_spec_from_json({{"family", "free_group"}}), PreconditionError);
  CHECK_THROWS_AS(group_spec_from_json({{"family", "iterated_wreath"}, {"depth", 3}, {"q", 2}}),
                  PreconditionError);
}

TEST_CASE("ball sizes in Z^2 and Z^3") {
  Group Z2(GroupSpec::free_abelian(2)), Z3(GroupSpec::free_abelian(3));
  auto b2 = make_ball(Z2, Z2.standard_generators(), 10);
  auto b3 = make_ball(Z3, Z3.standard_generators(), 8);
  for (int r = 0; r <= 10; ++r) CHECK(b2.ball_size(r) == std::size_t(2 * r * r + 2 * r + 1));
  for (int r = 0; r <= 8; ++r) {
    CHECK(b3.ball_size(r) == std::size_t((2 * r + 1) * (2 * r * r + 2 * r + 3) / 3));
  }
  CHECK(b2[0] == Z2.identity());
}

TEST_CASE("ball cap raises a resource error with the completed radius") {
  Group Z2(GroupSpec::free_abelian(2));
  BallOptions o;
  o.max_elements = 100;
  try {
    make_ball(Z2, Z2.standard_generators(), 50, o);
    FAIL("expected a resource error");
  } catch (const ResourceError& e) {
    CHECK(e.reached() == 6);  // |B(6)| = 85, |B(7)| = 113
  }
}

TEST_CASE("heisenberg commutator of the generators is central") {
  Group H(GroupSpec::heisenberg());
  auto x = vec(H, {1, 0, 0}), y = vec(H, {0, 1, 0});
  auto c = H.multiply(H.multiply(x, y), H.multiply(H.inverse(x), H.inverse(y)));
  CHECK_FALSE(H.is_identity(c));
  for (const auto& g : H.standard_generators().elements) CHECK(H.multiply(c, g) == H.multiply(g, c));
}

TEST_CASE("simple random walk on Z against the central binomial") {
  Group Z(GroupSpec::free_abelian(1));
  ReturnOptions ro;
  ro.mode = Arithmetic::exact;
  auto s = return_probability(srw_measure(Z, Z.standard_generators()), 31, ro);
  for (unsigned t = 0; t <= 15; ++t) {
    CHECK(s.exact[2 * t] == binom_over_4t(t));
    CHECK(s.exact[2 * t + 1] == 0);
  }
  CHECK(decimal_string(s.exact[4], 5) == "3.7500e-01");
}

TEST_CASE("lazy walk on Z with holding 1/2 has p(t) = C(2t,t)/4^t") {
  Group Z(GroupSpec::free_abelian(1));
  ReturnOptions ro;
  ro.mode = Arithmetic::exact;
  auto s = return_probability(lazy_measure(Z, Z.standard_generators(), mpq_class(1, 2)), 20, ro);
  for (unsigned t = 0; t <= 20; ++t) CHECK(s.exact[t] == binom_over_4t(t));
}

TEST_CASE("float kernels agree with exact arithmetic") {
  for (const auto& spec : {GroupSpec::free_abelian(2), GroupSpec::free_abelian(3), GroupSpec::heisenberg(),
                           GroupSpec::wreath(GroupSpec::cyclic(2), 1)}) {
    Group G(spec);
    auto mu = srw_measure(G, G.standard_generators());
    ReturnOptions ex, fl;
    ex.mode = Arithmetic::exact;
    ex.structured = false;
    fl.mode = Arithmetic::floating;
    auto a = return_probability(mu, 16, ex), b = return_probability(mu, 16, fl);
    for (int t = 0; t <= 16; ++t) {
      CHECK(b.values[t] == doctest::Approx(a.exact[t].get_d()).epsilon(1e-9));
    }
  }
}

TEST_CASE("structured and generic exact kernels agree") {
  Group Z2(GroupSpec::free_abelian(2));
  auto mu = lazy_measure(Z2, Z2.standard_generators(), mpq_class(1, 3));
  ReturnOptions a, b;
  a.mode = b.mode = Arithmetic::exact;
  b.structured = false;
  auto s = return_probability(mu, 14, a), g = return_probability(mu, 14, b);
  CHECK(s.kernel != g.kernel);
  for (int t = 0; t <= 14; ++t) CHECK(s.exact[t] == g.exact[t]);
}

TEST_CASE("automatic mode switches to floating point past the step limit") {
  Group Z(GroupSpec::free_abelian(1));
  auto mu = srw_measure(Z, Z.standard_generators());
  ReturnOptions o;
  o.exact_step_limit = 10;
  CHECK(return_probability(mu, 10, o).mode == Arithmetic::exact);
  CHECK(return_probability(mu, 11, o).mode == Arithmetic::floating);
}

TEST_CASE("support cap truncates the series") {
  Group Z2(GroupSpec::free_abelian(2));
  ReturnOptions o;
  o.mode = Arithmetic::exact;
  o.structured = false;
  o.support_cap = 200;
  auto s = return_probability(srw_measure(Z2, Z2.standard_generators()), 40, o);
  CHECK(s.truncated);
  CHECK(s.achieved < 40);
  CHECK(s.values.size() == std::size_t(s.achieved + 1));
}

TEST_CASE("non-symmetric measures are rejected with the violating pair") {
  Group Z(GroupSpec::free_abelian(1));
  std::vector<std::pair<Element, mpq_class>> w{{vec(Z, {1}), mpq_class(1, 2)},
                                               {vec(Z, {-1}), mpq_class(1, 4)},
                                               {vec(Z, {0}), mpq_class(1, 4)}};
  try {
    Measure::from_weights(Z, w);
    FAIL("expected a precondition error");
  } catch (const PreconditionError& e) {
    std::string m = e.what();
    CHECK(m.find("(1)") != std::string::npos);
    CHECK(m.find("(-1)") != std::string::npos);
  }
}

TEST_CASE("Monte Carlo estimate is seeded and brackets the exact value") {
  Group Z2(GroupSpec::free_abelian(2));
  auto mu = srw_measure(Z2, Z2.standard_generators());
  auto a = mc_return_probability(mu, 8, 200000, 11), b = mc_return_probability(mu, 8, 200000, 11);
  CHECK(a.hits == b.hits);
  ReturnOptions o;
  o.mode = Arithmetic::exact;
  double p = return_probability(mu, 8, o).exact[8].get_d();
  CHECK(std::abs(a.estimate - p) <= 5 * a.std_error);
  CHECK(a.ci_low <= p);
  CHECK(p <= a.ci_high);
}

TEST_CASE("exact series do not depend on the thread count") {
  Group H(GroupSpec::heisenberg());
  auto mu = srw_measure(H, H.standard_generators());
  ReturnOptions o;
  o.mode = Arithmetic::exact;
  omp_set_num_threads(1);
  auto a = return_probability(mu, 20, o);
  omp_set_num_threads(4);
  auto b = return_probability(mu, 20, o);
  omp_set_num_threads(1);
  CHECK(a.exact == b.exact);
}

#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <random>

#include "isospec/kernels.hpp"

using namespace isospec;
using namespace isospec::kernels;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng) * std::exp(10 * u(rng));
  return v;
}

template <class F>
void for_threads(F&& f) {
  for (int th : {1, 2, 3, 7}) {
    omp_set_num_threads(th);
    f(th);
  }
  omp_set_num_threads(1);
}

}  // namespace

TEST_CASE("pairwise sums are bit-identical across flavours and thread counts") {
  for (std::size_t n : {0, 1, 5, 1000, 100003}) {
    auto x = noise(n, n);
    double ref = serial::pairwise_sum(x);
    for_threads([&](int th) {
      INFO("n " << n << " threads " << th);
      CHECK(omp::pairwise_sum(x) == ref);
    });
  }
  std::vector<double> ones(12345, 0.5);
  CHECK(serial::pairwise_sum(ones) == 6172.5);
}

TEST_CASE("gather matches a direct loop") {
  Stencil st;
  st.targets = 500;
  st.width = 3;
  std::mt19937_64 rng(7);
  for (std::size_t i = 0; i < st.targets * st.width; ++i) {
    st.source.push_back(rng() % 5 == 0 ? -1 : static_cast<std::int64_t>(rng() % 400));
  }
  std::vector<double> w{0.25, 0.5, 0.25};
  auto in = noise(400, 3);
  std::vector<double> a(st.targets), b(st.targets);
  serial::gather(st, w, in, a);
  for (std::size_t i = 0; i < st.targets; ++i) {
    double want = 0;
    for (std::size_t k = 0; k < 3; ++k) {
      auto s = st.source[i * 3 + k];
      if (s >= 0) want += w[k] * in[s];
    }
    CHECK(a[i] == doctest::Approx(want).epsilon(1e-14));
  }
  for_threads([&](int) {
    omp::gather(st, w, in, b);
    CHECK(a == b);
  });

  std::vector<mpz_class> wz{1, 2, 1}, inz(400), az(st.targets), bz(st.targets);
  for (std::size_t i = 0; i < 400; ++i) inz[i] = mpz_class(static_cast<long>(i * i));
  serial::gather(st, std::span<const mpz_class>(wz), inz, az);
  omp::gather(st, std::span<const mpz_class>(wz), inz, bz);
  CHECK(az == bz);
}

TEST_CASE("lattice step agrees between flavours") {
  auto L = make_lattice(2, 20);
  LatticeStep step;
  step.lattice = &L;
  step.active = 15;
  step.shifts = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  std::vector<double> w(4, 0.25), in(L.cells(), 0.0), a(L.cells(), 0.0), b(L.cells(), 0.0);
  auto r = noise(L.cells(), 11);
  std::vector<std::int64_t> x(2);
  for (x[0] = -14; x[0] <= 14; ++x[0])
    for (x[1] = -14; x[1] <= 14; ++x[1]) in[L.offset(x)] = r[L.offset(x)];
  serial::lattice_step(step, w, in, a);
  // direct stencil at an interior point
  x = {3, -4};
  std::vector<std::int64_t> e{2, -4}, f{4, -4}, g{3, -5}, h{3, -3};
  CHECK(a[L.offset(x)] ==
        doctest::Approx(0.25 * (in[L.offset(e)] + in[L.offset(f)] + in[L.offset(g)] + in[L.offset(h)])));
  for_threads([&](int) {
    std::fill(b.begin(), b.end(), 0.0);
    omp::lattice_step(step, w, in, b);
    CHECK(a == b);
  });
}

TEST_CASE("tridiagonal blocks") {
  // path of n vertices: eigenvalues 2 cos(pi k / (n + 1))
  BlockFamily f;
  f.block_size = 10;
  f.off_diagonal.assign(9, 1.0);
  f.diagonals = {std::vector<double>(10, 0.0), std::vector<double>(10, 1.0)};
  f.multiplicity = {1, 1};
  auto s = serial::block_spectra(f);
  for (int k = 1; k <= 10; ++k) {
    CHECK(s[0][k - 1] == doctest::Approx(2 * std::cos(M_PI * (11 - k) / 11.0)).epsilon(1e-13));
    CHECK(s[1][k - 1] == doctest::Approx(1 + 2 * std::cos(M_PI * (11 - k) / 11.0)).epsilon(1e-13));
  }
  for_threads([&](int) { CHECK(omp::block_spectra(f) == s); });
}

TEST_CASE("graded theta rule integrates smooth functions on [0, pi]") {
  auto r = graded_theta_rule(6, 12);
  double one = 0, c2 = 0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    one += r.weights[i];
    c2 += r.weights[i] * std::cos(r.nodes[i]) * std::cos(r.nodes[i]);
  }
  CHECK(one == doctest::Approx(M_PI).epsilon(1e-14));
  CHECK(c2 == doctest::Approx(M_PI / 2).epsilon(1e-14));
}

TEST_CASE("twisted integral is bit-identical across thread counts") {
  TwistedWalk walk;
  walk.steps = 12;
  walk.moves = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}};
  walk.weights = {0.25, 0.25, 0.25, 0.25};
  auto rule = graded_theta_rule(5, 8);
  auto ref = serial::twisted_integral(walk, rule);
  for_threads([&](int) {
    auto s = omp::twisted_integral(walk, rule);
    CHECK(s.norm == ref.norm);
    CHECK(s.cross == ref.cross);
  });
}

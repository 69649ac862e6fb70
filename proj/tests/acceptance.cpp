// One PASS/FAIL line per acceptance criterion.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <omp.h>

#include <Eigen/Dense>
#include <gmpxx.h>

#include "isospec/asymptotics.hpp"
#include "isospec/errors.hpp"
#include "isospec/io.hpp"
#include "isospec/isoperimetry.hpp"
#include "isospec/spectral.hpp"
#include "isospec/transforms.hpp"
#include "isospec/walk.hpp"

using namespace isospec;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

mpq_class central_binomial_over_4t(unsigned t) {
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), 2 * t, t);
  mpz_class den = 1;
  den <<= 2 * t;
  mpq_class q(b, den);
  q.canonicalize();
  return q;
}

mpz_class factorial(unsigned n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return f;
}

Measure srw(const Group& G) { return srw_measure(G, G.standard_generators()); }

Outcome exact_return() {
  const auto t0 = std::chrono::steady_clock::now();
  ReturnOptions ro;
  ro.mode = Arithmetic::exact;
  Group Z(GroupSpec::free_abelian(1));
  auto s1 = return_probability(srw(Z), 40, ro);
  int bad = 0;
  for (unsigned t = 0; t <= 20; ++t) bad += s1.exact[2 * t] != central_binomial_over_4t(t);
  // two-dimensional oracle: sum over k of (2t)! / (k!^2 (t-k)!^2) / 16^t
  Group Z2(GroupSpec::free_abelian(2));
  auto s2 = return_probability(srw(Z2), 24, ro);
  for (unsigned t = 0; t <= 12; ++t) {
    mpz_class sum = 0;
    for (unsigned k = 0; k <= t; ++k) {
      mpz_class a = factorial(k) * factorial(t - k);
      sum += factorial(2 * t) / (a * a);
    }
    mpz_class den = 1;
    den <<= 4 * t;
    mpq_class q(sum, den);
    q.canonicalize();
    bad += s2.exact[2 * t] != q;
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {bad == 0 && secs <= 60,
          std::to_string(bad) + " mismatches over Z t<=20 and Z^2 t<=12, " + num(secs, 3) + " s"};
}

double slope(const Measure& mu, int t_lo, int t_hi) {
  ReturnOptions ro;
  ro.mode = Arithmetic::floating;
  auto s = return_probability(mu, 2 * t_hi, ro);
  if (s.truncated) throw ResourceError("truncated", s.achieved);
  std::vector<double> ts, ps;
  for (int t = t_lo; t <= t_hi; ++t) {
    ts.push_back(t);
    ps.push_back(s.values[2 * t]);
  }
  return fit_exponent(ts, ps, FitModel::power, 0.5).exponent;
}

Outcome decay_slopes() {
  const auto t0 = std::chrono::steady_clock::now();
  Group Z(GroupSpec::free_abelian(1)), Z2(GroupSpec::free_abelian(2)), H(GroupSpec::heisenberg());
  double a = slope(srw(Z), 100, 1000), b = slope(srw(Z2), 100, 1000), c = slope(srw(H), 50, 400);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool ok = std::abs(a + 0.5) <= 0.05 && std::abs(b + 1) <= 0.05 && std::abs(c + 2) <= 0.1 &&
            secs <= 600;
  return {ok, "Z " + num(a) + ", Z^2 " + num(b) + ", Heisenberg " + num(c) + ", " + num(secs, 3) + " s"};
}

std::vector<Element> interval(const Group& G, int n) {
  std::vector<Element> out;
  for (std::int64_t i = 0; i < n; ++i) out.push_back(G.make_vector(std::vector<std::int64_t>{i}));
  return out;
}

std::vector<Element> square(const Group& G, int n) {
  std::vector<Element> out;
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j) out.push_back(G.make_vector(std::vector<std::int64_t>{i, j}));
  return out;
}

double esd_exponent(const EmpiricalSpectralDistribution& N, Window w) {
  std::vector<double> xs = log_grid(w.lo, w.hi, 25, 26), ys;
  for (double x : xs) ys.push_back(N(x));
  return fit_exponent(xs, ys, FitModel::power, 0.8).exponent;
}

Outcome esd_exponents() {
  Group Z(GroupSpec::free_abelian(1)), Z2(GroupSpec::free_abelian(2));
  const int n = 4000;
  auto N1 = esd(DirichletOperator(srw(Z), interval(Z, n)));
  auto N2 = esd(DirichletOperator(srw(Z2), square(Z2, 63)));
  double a = esd_exponent(N1, {1e-3, 1e-1}), b = esd_exponent(N2, {3e-2, 2e-1});
  double worst = 0;
  for (double l : {0.2, 0.5, 1.0}) worst = std::max(worst, std::abs(N1(l) - std::acos(1 - l) / M_PI));
  bool ok = std::abs(a - 0.5) <= 0.1 && std::abs(b - 1) <= 0.1 && worst <= 2.0 / n;
  return {ok, "Z " + num(a) + ", Z^2 " + num(b) + ", arcsine deviation " + num(worst, 3) +
                  " (bound " + num(2.0 / n, 3) + ")"};
}

Outcome sandwich() {
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<int> njumps(1, 60);
  std::uniform_real_distribution<double> u(0, 1);
  const auto times = log_grid(0.1, 100, 8);
  int fails = 0, oracle_mismatch = 0, checks = 0;
  for (int k = 0; k < 1000; ++k) {
    int m = njumps(rng);
    std::vector<double> pts(m), w(m);
    for (auto& p : pts) p = std::pow(10.0, -4 + 4.5 * u(rng));
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    w.resize(pts.size());
    double total = 0;
    for (auto& x : w) total += (x = u(rng) + 1e-3);
    const double mass = 0.2 + 0.8 * u(rng);
    std::vector<double> vals;
    long double acc = 0;
    for (double x : w) vals.push_back(static_cast<double>(acc += x / total * mass));
    vals.back() = std::min(vals.back(), mass);
    StepFn F(0, pts, vals);
    for (double t : times) {
      auto r = laplace_sandwich_check(F, t);
      ++checks;
      fails += !r.pass;
      long double le = INFINITY, integral = 0, prev = 0;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        le = std::min(le, static_cast<long double>(t) * pts[i] - std::log(static_cast<long double>(vals[i])));
        integral += std::exp(-static_cast<long double>(t) * pts[i]) * (vals[i] - prev);
        prev = vals[i];
      }
      if (std::abs(le - r.le) > 1e-9 * (1 + std::abs(le)) ||
          std::abs(integral - r.integral) > 1e-12 * integral) {
        ++oracle_mismatch;
      }
    }
  }
  return {fails == 0 && oracle_mismatch == 0,
          std::to_string(checks) + " checks, " + std::to_string(fails) + " failures, " +
              std::to_string(oracle_mismatch) + " oracle mismatches"};
}

Outcome two_tails() {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> size(5, 50);
  std::normal_distribution<double> g;
  int fails = 0, inconclusive = 0, total = 0;
  for (int k = 0; k < 100; ++k) {
    int n = size(rng);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = g(rng);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    a /= es.eigenvalues().cwiseAbs().maxCoeff() * (1 + 1e-9);
    for (int j = 0; j < 20; ++j) {
      double lambda = (j + 0.5) / 20;
      auto r = two_tails_check(a, lambda);
      ++total;
      fails += r.status == TwoTails::fails;
      inconclusive += r.status == TwoTails::inconclusive;
    }
  }
  return {fails == 0 && inconclusive * 100 < total,
          std::to_string(total) + " cases, " + std::to_string(fails) + " failures, " +
              std::to_string(inconclusive) + " inconclusive"};
}

Outcome functional_equation() {
  double worst = 0;
  bool invariants = true;
  std::string note;
  const auto times = octave_grid(1e-3, 1e4);
  for (double d : {1.0, 2.0, 3.0}) {
    auto L = MonotoneFn::expression(expr::pow(expr::var(), -2 / d), Monotonicity::decreasing, 1e-300,
                                    1e300, "v^-2/d");
    auto sol = solve_functional_equation(L, times);
    for (std::size_t i = 0; i < sol.t.size(); ++i) {
      double v = d / 2 * std::log1p(2 * sol.t[i] / d);
      worst = std::max(worst, std::abs(sol.v[i] - v) / std::max(1.0, v));
    }
    auto inv = functional_equation_invariants(sol, 1e-7, false);
    invariants = invariants && inv.all();
  }
  // a profile without a power law: Lambda(v) = log(v)^-2 for v >= e
  auto L = MonotoneFn::expression(
      expr::pow(expr::log(expr::add(expr::var(), expr::constant(M_E))), -2), Monotonicity::decreasing,
      1e-300, 1e300, "log(v + e)^-2");
  auto sol = solve_functional_equation(L, times);
  auto inv = functional_equation_invariants(sol, 1e-7, false);
  invariants = invariants && inv.all();
  note = "D = " + num(inv.D) + ", C = " + num(inv.C_doubling);
  return {worst <= 1e-6 && invariants,
          "closed-form error " + num(worst, 3) + ", invariants " + (invariants ? "hold" : "fail") +
              " (" + note + ")"};
}

Outcome cheeger() {
  int checked = 0, violations = 0;
  double tightest = INFINITY;
  for (auto [d, vmax] : {std::pair{1, 12}, std::pair{2, 9}}) {
    Group G(GroupSpec::free_abelian(d));
    auto S = G.standard_generators();
    Measure mu = srw(G);
    enumerate_connected(
        G, S.elements, vmax,
        [&](const std::vector<Element>& omega) {
          double l1 = lambda1(DirichletOperator(mu, omega)).value;
          auto b = cheeger_lower(G, S, omega);
          ++checked;
          if (l1 < b.value * (1 - 1e-12)) ++violations;
          tightest = std::min(tightest, l1 / b.value);
          return true;
        },
        true);
  }
  return {violations == 0 && checked > 0,
          std::to_string(checked) + " sets, " + std::to_string(violations) +
              " violations, min lambda1 / bound " + num(tightest)};
}

Outcome folner() {
  Group Z(GroupSpec::free_abelian(1));
  auto S = Z.standard_generators();
  std::vector<int> radii;
  for (int r = 1; r <= 8; ++r) radii.push_back(r);
  auto v = folner_function(Z, S, radii);
  auto ball = make_ball(Z, S, 8);
  bool ok = v[0].value == 3 && v[1].value == 5;
  int oracle_bad = 0, below_ball = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    // an interval of n points has two boundary points
    oracle_bad += v[i].value != static_cast<std::size_t>(2 * radii[i] + 1);
    if (i && v[i].value < v[i - 1].value) ok = false;
    below_ball += double(v[i].value) < ball_folner_lower(ball, radii[i]).value;
  }
  ok = ok && oracle_bad == 0 && below_ball == 0;
  return {ok, "Fo(1) = " + std::to_string(v[0].value) + ", Fo(2) = " + std::to_string(v[1].value) +
                  ", " + std::to_string(oracle_bad) + " off 2r+1, " + std::to_string(below_ball) +
                  " below the lower bound"};
}

Outcome wreath() {
  const auto t0 = std::chrono::steady_clock::now();
  Group W(GroupSpec::wreath(GroupSpec::cyclic(2), 1));
  MainFormulaOptions o;
  o.lambda_window = {3e-2, 3e-1};
  o.expected_exponent = 0.5;
  o.exponent_tolerance = 0.12;
  o.max_D = 10;
  auto r = verify_main_formula(srw(W), o);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool ok = r.lower && r.upper && r.lower->holds && r.upper->holds && r.lower->D <= 10 &&
            r.upper->D <= 10 && std::abs(r.esd_fit.exponent - 0.5) <= 0.12 && secs <= 1800;
  return {ok, "lower D " + (r.lower ? num(r.lower->D) : "-") + ", upper D " +
                  (r.upper ? num(r.upper->D) : "-") + ", slope " + num(r.esd_fit.exponent) + " (" +
                  r.esd_label + "), " + num(secs, 3) + " s"};
}

double worst_D(const std::vector<ComparisonReport>& reps, bool& all) {
  double w = 0;
  for (const auto& r : reps) {
    all = all && r.holds;
    for (const auto& p : r.parts) w = std::max({w, p.D, 1 / p.D});
  }
  return w;
}

Outcome measure_comparison() {
  Group Z(GroupSpec::free_abelian(1)), Z2(GroupSpec::free_abelian(2));
  std::vector<Element> steps;
  for (std::int64_t s : {-2, -1, 1, 2}) steps.push_back(Z.make_vector(std::vector<std::int64_t>{s}));
  auto z = compare_measures(srw(Z), uniform_measure(Z, steps), {interval(Z, 1000), interval(Z, 4000)},
                            {1e-3, 1e-1});
  auto z2 = compare_measures(srw(Z2), lazy_measure(Z2, Z2.standard_generators(), mpq_class(1, 2)),
                             {square(Z2, 32), square(Z2, 63)}, {1e-3, 1e-1});
  bool all = true;
  double a = worst_D(z, all), b = worst_D(z2, all);
  return {all && a <= 8 && b <= 8, "Z max D " + num(a) + ", Z^2 max D " + num(b)};
}

Outcome laplace() {
  std::string detail;
  bool ok = true;
  for (int d : {1, 2}) {
    Group G(GroupSpec::free_abelian(d));
    Measure mu = srw(G);
    auto r = verify_laplace_link(mu, family_esd(mu, 4000));
    ok = ok && r.pass;
    detail += (d == 1 ? "Z" : ", Z^2") + std::string(" factor ") + num(r.max_factor) + " at D " + num(r.D);
  }
  return {ok, detail};
}

Outcome determinism() {
  std::vector<std::pair<std::string, Measure>> cases;
  Group Z2(GroupSpec::free_abelian(2)), Z3(GroupSpec::free_abelian(3)), H(GroupSpec::heisenberg()),
      W(GroupSpec::wreath(GroupSpec::cyclic(2), 1));
  cases.emplace_back("Z^2", srw(Z2));
  cases.emplace_back("Z^3", srw(Z3));
  cases.emplace_back("Heisenberg", srw(H));
  cases.emplace_back("Z_2 wr Z", srw(W));
  int differ = 0;
  const int max_threads = std::max(4, omp_get_num_procs());
  for (auto& [name, mu] : cases) {
    std::string ref;
    for (int th : {1, 2, max_threads}) {
      omp_set_num_threads(th);
      ReturnOptions ro;
      ro.mode = Arithmetic::exact;
      auto s = return_probability(mu, 24, ro);
      std::string bytes;
      for (const auto& q : s.exact) bytes += q.get_str() + "\n";
      auto h = io::sha256_hex(bytes);
      if (ref.empty()) ref = h;
      differ += h != ref;
    }
  }
  omp_set_num_threads(1);
  return {differ == 0, std::to_string(cases.size()) + " groups at 1, 2, " +
                           std::to_string(max_threads) + " threads, " + std::to_string(differ) +
                           " differing digests"};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    const char* id;
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion all[] = {
      {"1", "exact return probabilities", exact_return},
      {"2", "return probability decay exponents", decay_slopes},
      {"3", "spectral distribution exponents and arcsine limit", esd_exponents},
      {"4", "Laplace-Legendre sandwich", sandwich},
      {"5", "two-tails projection identity", two_tails},
      {"6", "functional equation", functional_equation},
      {"7", "Cheeger lower bound", cheeger},
      {"8", "Folner function", folner},
      {"9", "lamplighter templates and exponent", wreath},
      {"10", "comparison of measures", measure_comparison},
      {"11", "return probability vs spectral Laplace transform", laplace},
      {"12", "thread-count determinism", determinism},
  };
  std::string only = argc > 1 ? argv[1] : "";
  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && only != c.id) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << o.detail
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}

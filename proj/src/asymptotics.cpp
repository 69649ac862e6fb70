#include "isospec/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "isospec/errors.hpp"
#include "isospec/isoperimetry.hpp"
#include "isospec/lamp_box.hpp"

namespace isospec {

std::string to_string(FitModel m) {
  switch (m) {
    case FitModel::power:
      return "power";
    case FitModel::stretched_exp:
      return "stretched_exp";
    case FitModel::log_power:
      return "log_power";
  }
  return "?";
}

FitModel fit_model_from_string(const std::string& s) {
  if (s == "power") return FitModel::power;
  if (s == "stretched_exp") return FitModel::stretched_exp;
  if (s == "log_power") return FitModel::log_power;
  throw PreconditionError("unknown fit model '" + s + "'");
}

nlohmann::json FitResult::to_json() const {
  return {{"model", to_string(model)}, {"exponent", exponent}, {"intercept", intercept},
          {"residual", residual},      {"decades", decades},   {"points", points}};
}

FitResult fit_exponent(std::span<const double> x, std::span<const double> y, FitModel model,
                       double min_decades) {
  if (x.size() != y.size()) throw PreconditionError("fit: x and y differ in length");
  if (x.size() < 2) throw PreconditionError("fit: needs at least two samples");
  std::vector<double> X, Y;
  double xmin = INFINITY, xmax = -INFINITY;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) throw PreconditionError("fit: samples must be positive");
    xmin = std::min(xmin, x[i]);
    xmax = std::max(xmax, x[i]);
    switch (model) {
      case FitModel::power:
        X.push_back(std::log(x[i]));
        Y.push_back(std::log(y[i]));
        break;
      case FitModel::stretched_exp:
        if (!(y[i] < 1)) throw PreconditionError("fit: stretched exponential needs y < 1");
        X.push_back(std::log(x[i]));
        Y.push_back(std::log(-std::log(y[i])));
        break;
      case FitModel::log_power:
        if (!(x[i] > 1)) throw PreconditionError("fit: log power needs x > 1");
        X.push_back(std::log(std::log(x[i])));
        Y.push_back(std::log(y[i]));
        break;
    }
  }
  FitResult r;
  r.model = model;
  r.points = X.size();
  r.decades = std::log10(xmax / xmin);
  if (r.decades < min_decades - 1e-9) {
    throw PreconditionError("fit: data spans " + std::to_string(r.decades) + " decades, needs " +
                            std::to_string(min_decades));
  }
  const double n = double(X.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    mx += X[i];
    my += Y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    sxx += (X[i] - mx) * (X[i] - mx);
    sxy += (X[i] - mx) * (Y[i] - my);
  }
  if (!(sxx > 0)) throw PreconditionError("fit: x values are all equal");
  r.exponent = sxy / sxx;
  r.intercept = my - r.exponent * mx;
  double ss = 0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    double e = Y[i] - (r.intercept + r.exponent * X[i]);
    ss += e * e;
  }
  r.residual = std::sqrt(ss / n);
  return r;
}

nlohmann::json AsymptoticTemplate::to_json() const {
  return {{"row", row},
          {"family", family},
          {"d", d},
          {"k", k},
          {"p", expr::to_string(p)},
          {"N", expr::to_string(N)},
          {"Lambda", expr::to_string(Lambda)},
          {"Folner", expr::to_string(Folner)},
          {"level", level}};
}

AsymptoticTemplate asymptotic_template(int row, double d, int k) {
  using namespace expr;
  AsymptoticTemplate t;
  t.row = row;
  t.d = d;
  auto x = var();
  auto c = [](double v) { return constant(v); };
  switch (row) {
    case 1:
      t.family = "polynomial growth of degree d";
      t.p = pow(x, -d / 2);
      t.neg_log_N = mul(c(-d / 2), log(x));
      t.Lambda = pow(x, -2 / d);
      t.Folner = pow(x, d);
      t.level = 1;
      t.u_lo = 1e-6;
      t.u_hi = 1e6;
      break;
    case 2:
      t.family = "torsion-free solvable, exponential growth, finite Pruefer rank";
      t.d = 1;
      t.p = exp(neg(pow(x, 1.0 / 3)));
      t.neg_log_N = pow(x, -0.5);
      t.Lambda = pow(log(x), -2);
      t.Folner = exp(x);
      t.level = 2;
      t.u_lo = 1e-6;
      t.u_hi = 700;
      break;
    case 3:
      t.family = "F wr N, F finite, N of growth degree d";
      t.p = exp(neg(pow(x, d / (d + 2))));
      t.neg_log_N = pow(x, -d / 2);
      t.Lambda = pow(log(x), -2 / d);
      t.Folner = exp(pow(x, d));
      t.level = 2;
      t.u_lo = 1e-6;
      t.u_hi = 700;
      break;
    case 4:
      t.family = "A wr N, A infinite of polynomial growth, N of growth degree d";
      t.p = exp(neg(mul(pow(x, d / (d + 2)), pow(log(x), 2 / (d + 2)))));
      t.neg_log_N = mul(pow(x, -d / 2), neg(log(x)));
      t.Lambda = pow(div(log(x), log(log(x))), -2 / d);
      t.Folner = exp(mul(pow(x, d), log(x)));
      t.level = 2;
      t.u_lo = 1 + 1e-9;
      t.u_hi = 700;
      break;
    case 5:
      if (k < 2) throw PreconditionError("table row 5 needs k >= 2");
      t.family = "F wr (... wr (F wr Z)), " + std::to_string(k) + " times";
      t.k = k;
      t.p = exp(neg(div(x, pow(iterate_log(x, k - 1), 2))));
      t.neg_log_N = iterate_exp(pow(x, -0.5), k - 1);
      t.Lambda = pow(iterate_log(x, k), -2);
      t.Folner = iterate_exp(x, k);
      t.level = k;
      t.u_lo = 1e-6;
      t.u_hi = 1e6;
      break;
    case 6:
      if (k < 2) throw PreconditionError("table row 6 needs k >= 2");
      t.family = "Z wr (... wr (Z wr Z)), " + std::to_string(k) + " times";
      t.k = k;
      t.p = exp(neg(mul(x, pow(div(iterate_log(x, k), iterate_log(x, k - 1)), 2))));
      t.neg_log_N = iterate_exp(mul(pow(x, -0.5), neg(log(x))), k - 1);
      t.Lambda = pow(div(iterate_log(x, k), iterate_log(x, k + 1)), -2);
      t.Folner = iterate_exp(mul(x, log(x)), k);
      t.level = k + 1;
      t.u_lo = 1 + 1e-9;
      t.u_hi = 700;
      break;
    default:
      throw PreconditionError("table rows are 1..6");
  }
  t.N = exp(neg(t.neg_log_N));
  return t;
}

std::vector<AsymptoticTemplate> template_catalogue() {
  return {asymptotic_template(1, 1), asymptotic_template(1, 2), asymptotic_template(1, 4),
          asymptotic_template(2),    asymptotic_template(3, 1), asymptotic_template(3, 2),
          asymptotic_template(4, 1), asymptotic_template(5, 1, 2), asymptotic_template(6, 1, 2)};
}

double template_tower_N(const AsymptoticTemplate& t, double lambda) {
  // level 1: -log N; each further level takes one more log
  auto s = expr::eval_log(t.neg_log_N, lambda);
  if (t.level == 1) return s.sign * std::exp(s.log_abs);
  if (s.sign <= 0) return NAN;
  double v = s.log_abs;
  for (int i = 2; i < t.level; ++i) {
    if (!(v > 0)) return NAN;
    v = std::log(v);
  }
  return v;
}

double template_tower_inverse(const AsymptoticTemplate& t, double lambda) {
  auto h = expr::compose(t.Lambda, expr::iterate_exp(expr::var(), t.level));
  auto f = MonotoneFn::expression(h, Monotonicity::decreasing, t.u_lo, t.u_hi, "Lambda o exp");
  return f.inverse(lambda);
}

ComparisonReport template_self_consistency(const AsymptoticTemplate& t, Window w,
                                           const ComparisonOptions& options) {
  ComparisonOptions o = options;
  o.dilatational = true;
  return simeq_tower([&t](double x) { return template_tower_inverse(t, x); },
                     [&t](double x) { return template_tower_N(t, x); }, t.level,
                     Direction::near_zero, w, o, "1/Lambda^-1 [row " + std::to_string(t.row) + "]",
                     "N [row " + std::to_string(t.row) + "]");
}

namespace {

std::vector<Element> box(const Group& G, const std::vector<std::int64_t>& lo,
                         const std::vector<std::int64_t>& hi) {
  std::vector<Element> out;
  std::vector<std::int64_t> x = lo;
  while (true) {
    out.push_back(G.make_vector(x));
    std::size_t j = lo.size();
    while (j-- > 0) {
      if (x[j] < hi[j]) {
        ++x[j];
        break;
      }
      x[j] = lo[j];
    }
    if (j == static_cast<std::size_t>(-1)) break;
  }
  return out;
}

bool lamp_blocks_apply(const Measure& mu) {
  try {
    LampBox::lambda1(mu, 1);
    return true;
  } catch (const PreconditionError&) {
    return false;
  }
}

}  // namespace

Region largest_region(const Measure& mu, std::size_t cap) {
  const Group& G = mu.group();
  const GroupSpec& spec = G.spec();
  Region r;
  if (spec.family == Family::free_abelian) {
    const int d = spec.rank;
    auto n = static_cast<std::int64_t>(std::floor(std::pow(double(cap), 1.0 / d) + 1e-9));
    while (n > 1 && std::pow(double(n), d) > double(cap)) --n;
    r.label = "cube side " + std::to_string(n);
    r.elements = box(G, std::vector<std::int64_t>(d, 0), std::vector<std::int64_t>(d, n - 1));
  } else if (spec.family == Family::heisenberg) {
    std::int64_t n = 1;
    while (double(2 * n + 3) * (2 * n + 3) * (2 * (n + 1) * (n + 1) + 1) <= double(cap)) ++n;
    r.label = "heisenberg box n=" + std::to_string(n);
    r.elements = box(G, {-n, -n, -n * n}, {n, n, n * n});
  } else {
    auto S = G.standard_generators();
    Ball b;
    try {
      b = make_ball(G, S, 1 << 20, {cap});
    } catch (const ResourceError& e) {
      b = make_ball(G, S, static_cast<int>(e.reached()), {cap});
    }
    r.label = "ball r=" + std::to_string(b.radius());
    r.elements = b.elements();
  }
  return r;
}

EmpiricalSpectralDistribution family_esd(const Measure& mu, std::size_t cap, int lamp_width) {
  const GroupSpec& spec = mu.group().spec();
  if (spec.family == Family::wreath && lamp_blocks_apply(mu)) {
    return LampBox(mu, lamp_width).esd();
  }
  auto region = largest_region(mu, cap);
  auto e = esd(DirichletOperator(mu, region.elements), cap);
  e.label = region.label;
  return e;
}

nlohmann::json MainFormulaReport::to_json() const {
  nlohmann::json j{{"route", route},
                   {"esd", esd_label},
                   {"doubling", doubling.to_json()},
                   {"profile_fit", profile_fit.to_json()},
                   {"esd_fit", esd_fit.to_json()},
                   {"predicted_exponent", predicted_exponent},
                   {"expected_exponent", expected_exponent},
                   {"main", main.to_json()},
                   {"notes", notes},
                   {"pass", pass}};
  if (lower) j["lower"] = lower->to_json();
  if (upper) j["upper"] = upper->to_json();
  return j;
}

MainFormulaReport verify_main_formula(const Measure& mu, const MainFormulaOptions& options) {
  const Group& G = mu.group();
  const GroupSpec& spec = G.spec();
  const bool lamp = spec.family == Family::wreath && lamp_blocks_apply(mu);
  MainFormulaReport rep;
  const Window lw = options.lambda_window;

  // profile upper bounds from candidate sets, as a decreasing table
  CandidateOptions co;
  co.max_size = options.profile_v_max;
  co.max_count = 80;
  const std::size_t v_max =
      lamp ? static_cast<std::size_t>(options.lamp_v_max) : options.profile_v_max;
  auto cands = profile_candidate_sets(mu, v_max, co);
  std::sort(cands.begin(), cands.end(),
            [](const Candidate& a, const Candidate& b) { return a.size < b.size; });
  std::vector<double> vs, ls;
  for (const auto& c : cands) {
    if (!vs.empty() && double(c.size) == vs.back()) {
      ls.back() = std::min(ls.back(), c.lambda1);
      continue;
    }
    if (!ls.empty() && c.lambda1 >= ls.back()) continue;
    vs.push_back(double(c.size));
    ls.push_back(c.lambda1);
  }
  if (vs.size() < 3) throw PreconditionError("main formula: too few candidate sets");
  auto Lambda = MonotoneFn::sampled(vs, ls, "Lambda (candidate upper bounds)");
  StepFn Lambda_step(ls.front(), vs, ls);

  // doubling of Lambda o exp over the measured log-volumes
  const double s_hi = std::log(vs.back());
  rep.doubling = doubling_check(compose_exp(Lambda), {std::max(1.0, s_hi / 8), s_hi}, 200, 1e-6,
                                options.doubling_trend_tolerance);
  rep.route = rep.doubling.pass ? "doubling" : "power-law";

  // ESD
  auto N = family_esd(mu, options.esd_cap, options.lamp_width);
  rep.esd_label = N.label;
  auto xs = log_grid(lw.lo, lw.hi, 25, 26);
  std::vector<double> ys;
  for (double x : xs) ys.push_back(N(x));

  // fits
  std::vector<double> fit_v, fit_l;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (vs[i] >= 4) {
      fit_v.push_back(vs[i]);
      fit_l.push_back(ls[i]);
    }
  }
  if (rep.route == "power-law") {
    rep.profile_fit = fit_exponent(fit_v, fit_l, FitModel::power, 1.0);
    rep.predicted_exponent = -1 / rep.profile_fit.exponent;
    rep.esd_fit = fit_exponent(xs, ys, FitModel::power, options.fit_decades);
  } else {
    rep.profile_fit = fit_exponent(fit_v, fit_l, FitModel::log_power, 0.5);
    rep.predicted_exponent = -1 / rep.profile_fit.exponent;
    std::vector<double> inv;
    for (double x : xs) inv.push_back(1 / x);
    rep.esd_fit = fit_exponent(inv, ys, FitModel::stretched_exp, options.fit_decades);
  }
  rep.expected_exponent =
      std::isnan(options.expected_exponent) ? rep.predicted_exponent : options.expected_exponent;
  const bool exponent_ok =
      std::abs(rep.esd_fit.exponent - rep.expected_exponent) <= options.exponent_tolerance;

  // ESD against 1 / Lambda^{-1}
  ComparisonOptions o = options.comparison;
  o.dilatational = true;
  LogFn log_esd = [&N](double x) { return std::log(N(x)); };
  LogFn log_pred = [&Lambda_step](double x) {
    return -std::log(Lambda_step.generalized_inverse(x));
  };
  rep.main = simeq(log_esd, log_pred, Direction::near_zero, lw, o, "ESD[" + N.label + "]",
                   "1/Lambda^-1");
  bool ok = rep.main.holds && exponent_ok;

  if (rep.route == "doubling" && lamp) {
    std::vector<FolnerCouple> couples;
    for (int n = 1; n <= options.couples; ++n) couples.push_back(folner_couple(mu, n));
    auto lower = n_lower_from_couples(couples);
    auto ball = make_ball(G, G.standard_generators(), options.growth_radius);
    auto growth = folner_growth_template(ball);
    auto upper = n_upper_from_folner(growth.F, {1, 1e3});
    rep.notes.push_back("lower template: " + lower.reason);
    rep.notes.push_back("upper template: " + upper.reason + ", kappa = " + std::to_string(growth.kappa));
    if (lower.accepted) {
      const MonotoneFn lf = *lower.fn;
      rep.lower = preceq([lf](double x) { return lf.log_value(x); }, log_esd, Direction::near_zero,
                         lw, o, "1/F_couples(lambda^-1/2)", "ESD");
      ok = ok && rep.lower->holds && rep.lower->D <= options.max_D;
    } else {
      ok = false;
    }
    if (upper.accepted) {
      const MonotoneFn uf = *upper.fn;
      rep.upper = preceq(log_esd, [uf](double x) { return uf.log_value(x); }, Direction::near_zero,
                         lw, o, "ESD", "1/F_growth(lambda^-1/2)");
      ok = ok && rep.upper->holds && rep.upper->D <= options.max_D;
    } else {
      ok = false;
    }
  } else if (rep.route == "doubling") {
    rep.notes.push_back("no couple construction for this family; one-sided templates skipped");
  }
  rep.pass = ok;
  return rep;
}

nlohmann::json LaplaceLinkReport::to_json() const {
  return {{"t", t},          {"p", p},       {"laplace", laplace}, {"D", D},
          {"max_factor", max_factor}, {"pass", pass}, {"esd", esd_label}};
}

LaplaceLinkReport verify_laplace_link(const Measure& mu, const EmpiricalSpectralDistribution& esd,
                                      const LaplaceLinkOptions& options) {
  if (options.t_max < 1) throw PreconditionError("laplace link: t_max must be positive");
  ReturnOptions ro;
  ro.mode = Arithmetic::exact;
  auto series = return_probability(mu, 2 * options.t_max, ro);
  if (series.truncated) throw ResourceError("laplace link: return series truncated", series.achieved);
  LaplaceLinkReport rep;
  rep.esd_label = esd.label;
  const StepFn F = esd.as_step();
  auto laplace = [&F](double s) {
    return F.stieltjes([s](double l) { return std::exp(-l * s); }, -INFINITY, INFINITY);
  };
  for (int t = 1; t <= options.t_max; ++t) {
    rep.t.push_back(t);
    rep.p.push_back(series.values[2 * t]);
  }
  double best = INFINITY, bestD = 1;
  for (double D : log_grid(options.d_lo, options.d_hi, options.per_decade)) {
    double worst = 0;
    for (std::size_t i = 0; i < rep.t.size(); ++i) {
      worst = std::max(worst, std::abs(std::log(rep.p[i] / laplace(D * rep.t[i]))));
    }
    if (worst < best) {
      best = worst;
      bestD = D;
    }
  }
  rep.D = bestD;
  rep.max_factor = std::exp(best);
  for (int t : rep.t) rep.laplace.push_back(laplace(bestD * t));
  rep.pass = rep.max_factor <= options.factor;
  return rep;
}

}  // namespace isospec

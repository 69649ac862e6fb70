#include "isospec/comparison.hpp"

#include <algorithm>
#include <cmath>

#include "isospec/errors.hpp"

namespace isospec {

std::string to_string(Direction d) {
  return d == Direction::near_zero ? "near_zero" : "near_infinity";
}

LogFn log_of(const MonotoneFn& f) {
  return [f](double x) { return f.log_value(x); };
}

LogFn log_of(const StepFn& f) {
  return [f](double x) { return std::log(f(x)); };
}

LogFn log_of(std::function<double(double)> f) {
  return [f = std::move(f)](double x) { return std::log(f(x)); };
}

std::vector<double> log_grid(double lo, double hi, int per_decade, int min_points) {
  if (!(lo > 0) || !(hi >= lo)) throw PreconditionError("log grid: need 0 < lo <= hi");
  if (hi == lo) return {lo};
  const double decades = std::log10(hi / lo);
  int n = std::max(min_points - 1, static_cast<int>(std::ceil(decades * per_decade - 1e-9)));
  n = std::max(n, 1);
  std::vector<double> x(n + 1);
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i <= n; ++i) x[i] = std::pow(10.0, a + (b - a) * i / n);
  x.front() = lo;
  x.back() = hi;
  return x;
}

namespace {

// margin(x, D): the log-excess that C has to absorb at x.
using Margin = std::function<double(double, double)>;

double safe_margin(const Margin& m, double x, double D) {
  double v;
  try {
    v = m(x, D);
  } catch (const std::exception&) {
    return INFINITY;
  }
  return std::isnan(v) ? INFINITY : v;
}

struct Needed {
  double value = -INFINITY;
  double argmax = NAN;
};

Needed needed(const Margin& m, const std::vector<double>& xs, double D) {
  Needed r;
  for (double x : xs) {
    double v = safe_margin(m, x, D);
    if (v > r.value || std::isnan(r.argmax)) {
      r.value = v;
      r.argmax = x;
    }
  }
  return r;
}

ComparisonReport search(const Margin& margin, bool allow_c, Direction dir, Window w,
                        const ComparisonOptions& o) {
  if (!(w.lo > 0) || !(w.hi > w.lo)) throw PreconditionError("comparison: bad window");
  ComparisonReport rep;
  rep.direction = dir;
  rep.window = w;
  rep.dilatational = o.dilatational || !allow_c;
  const auto xs = log_grid(w.lo, w.hi, o.x_per_decade, o.min_x_points);
  const auto dense =
      log_grid(w.lo, w.hi, o.x_per_decade * o.verify_factor, o.min_x_points * o.verify_factor);
  const auto ds = log_grid(o.d_lo, o.d_hi, o.grid_per_decade);
  const auto cs = log_grid(o.c_lo, o.c_hi, o.grid_per_decade);
  rep.grid_points = xs.size();
  rep.dense_points = dense.size();

  struct Candidate {
    std::size_t c_index;
    double D;
    Needed need;
  };
  std::vector<Candidate> cands;
  Needed best_fail;
  best_fail.value = INFINITY;
  for (double D : ds) {
    Needed n = needed(margin, xs, D);
    if (n.value < best_fail.value || std::isnan(best_fail.argmax)) best_fail = n;
    if (rep.dilatational) {
      if (n.value <= o.log_tolerance) cands.push_back({0, D, n});
      continue;
    }
    auto it = std::find_if(cs.begin(), cs.end(),
                           [&](double c) { return std::log(c) + o.log_tolerance >= n.value; });
    if (it != cs.end()) cands.push_back({static_cast<std::size_t>(it - cs.begin()), D, n});
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.c_index != b.c_index) return a.c_index < b.c_index;
    return std::abs(std::log(a.D)) < std::abs(std::log(b.D));
  });
  for (const auto& c : cands) {
    const double C = rep.dilatational ? 1.0 : cs[c.c_index];
    Needed n = needed(margin, dense, c.D);
    if (n.value <= std::log(C) + o.log_tolerance) {
      rep.holds = true;
      rep.verified = true;
      rep.C = C;
      rep.D = c.D;
      return rep;
    }
  }
  rep.holds = false;
  rep.refutation_x = best_fail.argmax;
  rep.refutation_excess = best_fail.value - (rep.dilatational ? 0.0 : std::log(o.c_hi));
  rep.D = std::nan("");
  rep.C = std::nan("");
  return rep;
}

}  // namespace

ComparisonReport preceq(const LogFn& log_f, const LogFn& log_g, Direction dir, Window w,
                        const ComparisonOptions& options, std::string f_name,
                        std::string g_name) {
  Margin m = [&](double x, double D) -> double {
    double a = log_f(x);
    if (a == -INFINITY) return -INFINITY;
    return a - log_g(D * x);
  };
  auto rep = search(m, true, dir, w, options);
  rep.relation = options.dilatational ? "dilatational preceq" : "preceq";
  rep.f_name = std::move(f_name);
  rep.g_name = std::move(g_name);
  return rep;
}

ComparisonReport simeq(const LogFn& log_f, const LogFn& log_g, Direction dir, Window w,
                       const ComparisonOptions& options, std::string f_name,
                       std::string g_name) {
  auto fwd = preceq(log_f, log_g, dir, w, options, f_name, g_name);
  auto bwd = preceq(log_g, log_f, dir, w, options, g_name, f_name);
  ComparisonReport rep;
  rep.relation = options.dilatational ? "dilatational simeq" : "simeq";
  rep.direction = dir;
  rep.window = w;
  rep.dilatational = options.dilatational;
  rep.holds = fwd.holds && bwd.holds;
  rep.verified = fwd.verified && bwd.verified;
  rep.C = rep.holds ? std::max(fwd.C, bwd.C) : std::nan("");
  rep.D = rep.holds ? std::max({fwd.D, 1 / fwd.D, bwd.D, 1 / bwd.D}) : std::nan("");
  rep.grid_points = fwd.grid_points;
  rep.dense_points = fwd.dense_points;
  rep.f_name = std::move(f_name);
  rep.g_name = std::move(g_name);
  if (!fwd.holds) {
    rep.refutation_x = fwd.refutation_x;
    rep.refutation_excess = fwd.refutation_excess;
  } else if (!bwd.holds) {
    rep.refutation_x = bwd.refutation_x;
    rep.refutation_excess = bwd.refutation_excess;
  }
  rep.parts = {std::move(fwd), std::move(bwd)};
  return rep;
}

ComparisonReport preceq_tower(const LogFn& tower_f, const LogFn& tower_g, int level,
                              Direction dir, Window w, const ComparisonOptions& options,
                              std::string f_name, std::string g_name) {
  if (level < 1) throw PreconditionError("tower comparison: level must be >= 1");
  Margin m = [&](double x, double D) -> double {
    double a = tower_f(x);
    if (a == INFINITY) return -INFINITY;
    return tower_g(D * x) - a;
  };
  ComparisonOptions o = options;
  o.dilatational = true;
  auto rep = search(m, false, dir, w, o);
  rep.relation = "dilatational preceq";
  rep.level = level;
  rep.f_name = std::move(f_name);
  rep.g_name = std::move(g_name);
  return rep;
}

ComparisonReport simeq_tower(const LogFn& tower_f, const LogFn& tower_g, int level,
                             Direction dir, Window w, const ComparisonOptions& options,
                             std::string f_name, std::string g_name) {
  auto fwd = preceq_tower(tower_f, tower_g, level, dir, w, options, f_name, g_name);
  auto bwd = preceq_tower(tower_g, tower_f, level, dir, w, options, g_name, f_name);
  ComparisonReport rep;
  rep.relation = "dilatational simeq";
  rep.direction = dir;
  rep.window = w;
  rep.dilatational = true;
  rep.level = level;
  rep.holds = fwd.holds && bwd.holds;
  rep.verified = fwd.verified && bwd.verified;
  rep.C = rep.holds ? 1.0 : std::nan("");
  rep.D = rep.holds ? std::max({fwd.D, 1 / fwd.D, bwd.D, 1 / bwd.D}) : std::nan("");
  rep.grid_points = fwd.grid_points;
  rep.dense_points = fwd.dense_points;
  rep.f_name = std::move(f_name);
  rep.g_name = std::move(g_name);
  if (!fwd.holds) {
    rep.refutation_x = fwd.refutation_x;
    rep.refutation_excess = fwd.refutation_excess;
  } else if (!bwd.holds) {
    rep.refutation_x = bwd.refutation_x;
    rep.refutation_excess = bwd.refutation_excess;
  }
  rep.parts = {std::move(fwd), std::move(bwd)};
  return rep;
}

nlohmann::json ComparisonReport::to_json() const {
  auto num = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  nlohmann::json j{{"relation", relation},
                   {"direction", to_string(direction)},
                   {"window", {window.lo, window.hi}},
                   {"dilatational", dilatational},
                   {"level", level},
                   {"holds", holds},
                   {"verified", verified},
                   {"C", num(C)},
                   {"D", num(D)},
                   {"x0", direction == Direction::near_zero ? window.hi : window.lo},
                   {"grid_points", grid_points},
                   {"dense_points", dense_points},
                   {"f", f_name},
                   {"g", g_name}};
  if (refutation_x) {
    j["refutation"] = {{"x", *refutation_x}, {"excess", num(refutation_excess)}};
  }
  if (!parts.empty()) {
    j["parts"] = nlohmann::json::array();
    for (const auto& p : parts) j["parts"].push_back(p.to_json());
  }
  return j;
}

}  // namespace isospec

#include "isospec/monotone_fn.hpp"

#include <algorithm>
#include <sstream>

#include "isospec/errors.hpp"

namespace isospec {

namespace expr {

namespace {

using K = ExprNode::Kind;

Expr node(K k, double c = 0, Expr a = nullptr, Expr b = nullptr) {
  return std::make_shared<const ExprNode>(ExprNode{k, c, std::move(a), std::move(b)});
}

bool has_var(const Expr& e) {
  if (!e) return false;
  if (e->kind == K::var) return true;
  return has_var(e->a) || has_var(e->b);
}

SignedLog from_double(double v) {
  if (v > 0) return {1, std::log(v)};
  if (v < 0) return {-1, std::log(-v)};
  if (std::isnan(v)) return {0, NAN};
  return {0, -INFINITY};
}

double to_double(const SignedLog& s) {
  if (std::isnan(s.log_abs)) return NAN;
  if (s.sign == 0) return 0.0;
  return s.sign * std::exp(s.log_abs);
}

struct Dual {
  double v, d;
};

Dual eval_dual(const Expr& e, double x) {
  switch (e->kind) {
    case K::var:
      return {x, 1};
    case K::constant:
      return {e->c, 0};
    case K::add: {
      Dual a = eval_dual(e->a, x), b = eval_dual(e->b, x);
      return {a.v + b.v, a.d + b.d};
    }
    case K::mul: {
      Dual a = eval_dual(e->a, x), b = eval_dual(e->b, x);
      return {a.v * b.v, a.d * b.v + a.v * b.d};
    }
    case K::pow: {
      Dual a = eval_dual(e->a, x);
      return {std::pow(a.v, e->c), e->c * std::pow(a.v, e->c - 1) * a.d};
    }
    case K::exp: {
      Dual a = eval_dual(e->a, x);
      double v = std::exp(a.v);
      return {v, v * a.d};
    }
    case K::log: {
      Dual a = eval_dual(e->a, x);
      return {std::log(a.v), a.d / a.v};
    }
  }
  return {NAN, NAN};
}

std::optional<Expr> invert_into(const Expr& e, Expr acc) {
  switch (e->kind) {
    case K::var:
      return acc;
    case K::constant:
      return std::nullopt;
    case K::pow:
      if (e->c == 0) return std::nullopt;
      return invert_into(e->a, pow(acc, 1.0 / e->c));
    case K::exp:
      return invert_into(e->a, log(acc));
    case K::log:
      return invert_into(e->a, exp(acc));
    case K::mul: {
      bool va = has_var(e->a), vb = has_var(e->b);
      if (va && vb) return std::nullopt;
      const Expr& inner = va ? e->a : e->b;
      double c = eval(va ? e->b : e->a, 0.0);
      if (c == 0) return std::nullopt;
      return invert_into(inner, mul(constant(1.0 / c), acc));
    }
    case K::add: {
      bool va = has_var(e->a), vb = has_var(e->b);
      if (va && vb) return std::nullopt;
      const Expr& inner = va ? e->a : e->b;
      double c = eval(va ? e->b : e->a, 0.0);
      return invert_into(inner, add(constant(-c), acc));
    }
  }
  return std::nullopt;
}

std::string fmt(double c) {
  std::ostringstream os;
  os.precision(12);
  os << c;
  return os.str();
}

}  // namespace

Expr var() { return node(K::var); }
Expr constant(double c) { return node(K::constant, c); }
Expr add(Expr a, Expr b) { return node(K::add, 0, std::move(a), std::move(b)); }
Expr mul(Expr a, Expr b) { return node(K::mul, 0, std::move(a), std::move(b)); }
Expr pow(Expr a, double p) { return node(K::pow, p, std::move(a)); }
Expr exp(Expr a) { return node(K::exp, 0, std::move(a)); }
Expr log(Expr a) {
  if (a->kind == K::exp) return a->a;
  return node(K::log, 0, std::move(a));
}
Expr neg(Expr a) { return mul(constant(-1), std::move(a)); }
Expr div(Expr a, Expr b) { return mul(std::move(a), pow(std::move(b), -1)); }

Expr compose(const Expr& f, const Expr& g) {
  switch (f->kind) {
    case K::var:
      return g;
    case K::constant:
      return f;
    case K::add:
      return add(compose(f->a, g), compose(f->b, g));
    case K::mul:
      return mul(compose(f->a, g), compose(f->b, g));
    case K::pow:
      return pow(compose(f->a, g), f->c);
    case K::exp:
      return exp(compose(f->a, g));
    case K::log:
      return log(compose(f->a, g));
  }
  return f;
}

Expr iterate_exp(Expr a, int k) {
  for (int i = 0; i < k; ++i) a = exp(a);
  return a;
}

Expr iterate_log(Expr a, int k) {
  for (int i = 0; i < k; ++i) a = log(a);
  return a;
}

SignedLog eval_log(const Expr& e, double x) {
  switch (e->kind) {
    case K::var:
      return from_double(x);
    case K::constant:
      return from_double(e->c);
    case K::add: {
      SignedLog a = eval_log(e->a, x), b = eval_log(e->b, x);
      if (std::isnan(a.log_abs) || std::isnan(b.log_abs)) return {0, NAN};
      if (a.sign == 0) return b;
      if (b.sign == 0) return a;
      if (a.log_abs < b.log_abs) std::swap(a, b);
      if (std::isinf(a.log_abs) && a.log_abs > 0) {
        if (std::isinf(b.log_abs) && b.log_abs > 0 && a.sign != b.sign) return {0, NAN};
        return a;
      }
      double r = std::exp(b.log_abs - a.log_abs);
      if (a.sign == b.sign) return {a.sign, a.log_abs + std::log1p(r)};
      if (r == 1.0) return {0, -INFINITY};
      return {a.sign, a.log_abs + std::log1p(-r)};
    }
    case K::mul: {
      SignedLog a = eval_log(e->a, x), b = eval_log(e->b, x);
      if (std::isnan(a.log_abs) || std::isnan(b.log_abs)) return {0, NAN};
      if (a.sign == 0 || b.sign == 0) return {0, -INFINITY};
      return {a.sign * b.sign, a.log_abs + b.log_abs};
    }
    case K::pow: {
      SignedLog a = eval_log(e->a, x);
      if (std::isnan(a.log_abs)) return a;
      if (a.sign == 0) {
        if (e->c > 0) return {0, -INFINITY};
        if (e->c == 0) return {1, 0};
        return {1, INFINITY};
      }
      if (a.sign < 0) {
        double r = std::round(e->c);
        if (r != e->c) return {0, NAN};
        int s = (static_cast<long long>(r) % 2 == 0) ? 1 : -1;
        return {s, e->c * a.log_abs};
      }
      return {1, e->c * a.log_abs};
    }
    case K::exp: {
      SignedLog a = eval_log(e->a, x);
      if (std::isnan(a.log_abs)) return a;
      return {1, to_double(a)};
    }
    case K::log: {
      if (e->a->kind == K::exp) return eval_log(e->a->a, x);
      SignedLog a = eval_log(e->a, x);
      if (std::isnan(a.log_abs) || a.sign <= 0) return {0, NAN};
      return from_double(a.log_abs);
    }
  }
  return {0, NAN};
}

double eval(const Expr& e, double x) { return to_double(eval_log(e, x)); }

double derivative(const Expr& e, double x) { return eval_dual(e, x).d; }

std::optional<Expr> invert(const Expr& e) { return invert_into(e, var()); }

std::string to_string(const Expr& e) {
  switch (e->kind) {
    case K::var:
      return "x";
    case K::constant:
      return fmt(e->c);
    case K::add:
      return "(" + to_string(e->a) + " + " + to_string(e->b) + ")";
    case K::mul:
      return "(" + to_string(e->a) + " * " + to_string(e->b) + ")";
    case K::pow:
      return to_string(e->a) + "^" + fmt(e->c);
    case K::exp:
      return "exp(" + to_string(e->a) + ")";
    case K::log:
      return "log(" + to_string(e->a) + ")";
  }
  return "?";
}

nlohmann::json to_json(const Expr& e) {
  switch (e->kind) {
    case K::var:
      return {{"op", "var"}};
    case K::constant:
      return {{"op", "const"}, {"value", e->c}};
    case K::add:
      return {{"op", "add"}, {"args", {to_json(e->a), to_json(e->b)}}};
    case K::mul:
      return {{"op", "mul"}, {"args", {to_json(e->a), to_json(e->b)}}};
    case K::pow:
      return {{"op", "pow"}, {"arg", to_json(e->a)}, {"p", e->c}};
    case K::exp:
      return {{"op", "exp"}, {"arg", to_json(e->a)}};
    case K::log:
      return {{"op", "log"}, {"arg", to_json(e->a)}};
  }
  return {};
}

Expr from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("op")) throw PreconditionError("expression: missing 'op'");
  std::string op = j.at("op").get<std::string>();
  if (op == "var") return var();
  if (op == "const") return constant(j.at("value").get<double>());
  if (op == "add" || op == "mul") {
    const auto& args = j.at("args");
    if (!args.is_array() || args.empty()) throw PreconditionError("expression: empty args");
    Expr r = from_json(args[0]);
    for (std::size_t i = 1; i < args.size(); ++i) {
      r = op == "add" ? add(r, from_json(args[i])) : mul(r, from_json(args[i]));
    }
    return r;
  }
  if (op == "pow") return pow(from_json(j.at("arg")), j.at("p").get<double>());
  if (op == "exp") return exp(from_json(j.at("arg")));
  if (op == "log") return log(from_json(j.at("arg")));
  throw PreconditionError("expression: unknown op '" + op + "'");
}

}  // namespace expr

// ---------------------------------------------------------------------------

MonotoneFn MonotoneFn::expression(Expr e, Monotonicity m, double lo, double hi,
                                  std::string name) {
  if (!(lo < hi)) throw PreconditionError("monotone function: empty domain");
  MonotoneFn f;
  f.kind_ = Kind::expression;
  f.mono_ = m;
  f.lo_ = lo;
  f.hi_ = hi;
  f.expr_ = std::move(e);
  f.name_ = std::move(name);
  return f;
}

MonotoneFn MonotoneFn::sampled(std::vector<double> x, std::vector<double> y, std::string name) {
  if (x.size() != y.size() || x.size() < 2) {
    throw PreconditionError("sampled function: need at least two (x, y) pairs");
  }
  MonotoneFn f;
  f.kind_ = Kind::sampled;
  f.name_ = std::move(name);
  bool inc = true, dec = true;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) {
      throw PreconditionError("sampled function: log-log table needs x > 0 and y > 0");
    }
    if (i > 0) {
      if (!(x[i - 1] < x[i])) throw PreconditionError("sampled function: x not increasing");
      if (y[i] < y[i - 1]) inc = false;
      if (y[i] > y[i - 1]) dec = false;
    }
    f.lx_.push_back(std::log(x[i]));
    f.ly_.push_back(std::log(y[i]));
  }
  if (!inc && !dec) throw PreconditionError("sampled function: table is not monotone");
  f.mono_ = inc ? Monotonicity::increasing : Monotonicity::decreasing;
  f.lo_ = x.front();
  f.hi_ = x.back();
  return f;
}

MonotoneFn MonotoneFn::step(StepFn s, double lo, double hi, std::string name) {
  MonotoneFn f;
  f.kind_ = Kind::step;
  f.mono_ = s.monotonicity();
  f.lo_ = lo;
  f.hi_ = hi;
  f.name_ = std::move(name);
  f.step_ = std::make_shared<const StepFn>(std::move(s));
  return f;
}

MonotoneFn MonotoneFn::callable(std::function<double(double)> fn, Monotonicity m, double lo,
                                double hi, std::string name,
                                std::function<double(double)> log_f) {
  MonotoneFn f;
  f.kind_ = Kind::callable;
  f.mono_ = m;
  f.lo_ = lo;
  f.hi_ = hi;
  f.name_ = std::move(name);
  f.fn_ = std::move(fn);
  f.log_fn_ = std::move(log_f);
  return f;
}

double MonotoneFn::log_value(double x) const {
  switch (kind_) {
    case Kind::expression: {
      auto s = expr::eval_log(expr_, x);
      if (s.sign < 0) return NAN;
      return s.sign == 0 ? (std::isnan(s.log_abs) ? NAN : -INFINITY) : s.log_abs;
    }
    case Kind::sampled: {
      const double t = std::log(x);
      const double eps = 1e-12 * std::max(1.0, std::abs(t));
      if (t < lx_.front() - eps || t > lx_.back() + eps) {
        throw PreconditionError("sampled function: " + std::to_string(x) + " outside table range");
      }
      auto it = std::upper_bound(lx_.begin(), lx_.end(), t);
      std::size_t i = it == lx_.begin() ? 0 : static_cast<std::size_t>(it - lx_.begin()) - 1;
      if (i + 1 >= lx_.size()) i = lx_.size() - 2;
      double u = (t - lx_[i]) / (lx_[i + 1] - lx_[i]);
      u = std::clamp(u, 0.0, 1.0);
      return ly_[i] + u * (ly_[i + 1] - ly_[i]);
    }
    case Kind::step:
      return std::log((*step_)(x));
    case Kind::callable:
      return log_fn_ ? log_fn_(x) : std::log(fn_(x));
  }
  return NAN;
}

double MonotoneFn::operator()(double x) const {
  switch (kind_) {
    case Kind::expression:
      return expr::eval(expr_, x);
    case Kind::sampled:
      return std::exp(log_value(x));
    case Kind::step:
      return (*step_)(x);
    case Kind::callable:
      return fn_(x);
  }
  return NAN;
}

double MonotoneFn::derivative(double x) const {
  if (kind_ == Kind::expression) return expr::derivative(expr_, x);
  double h = 1e-6 * std::max(std::abs(x), 1e-300);
  double a = std::max(lo_, x - h), b = std::min(hi_, x + h);
  return ((*this)(b) - (*this)(a)) / (b - a);
}

double MonotoneFn::inverse(double y) const {
  if (kind_ == Kind::step) return step_->generalized_inverse(y);
  const bool inc = increasing();
  const double flo = (*this)(lo_), fhi = (*this)(hi_);
  if (inc) {
    if (y < flo || y > fhi) {
      throw PreconditionError("inverse: level " + std::to_string(y) + " not attained on [" +
                              std::to_string(lo_) + ", " + std::to_string(hi_) + "]");
    }
  } else {
    if (flo <= y) return lo_;
    if (fhi > y) {
      throw PreconditionError("generalized inverse: level " + std::to_string(y) +
                              " below the range on [" + std::to_string(lo_) + ", " +
                              std::to_string(hi_) + "]");
    }
  }
  if (kind_ == Kind::expression) {
    if (auto inv = expr::invert(expr_)) {
      double x = expr::eval(*inv, y);
      if (std::isfinite(x)) return std::clamp(x, lo_, hi_);
    }
  }
  // bisection on log x (plain x when the domain touches 0)
  const bool logscale = lo_ > 0 && std::isfinite(hi_);
  double a = logscale ? std::log(lo_) : lo_, b = logscale ? std::log(hi_) : hi_;
  if (!std::isfinite(b)) throw PreconditionError("inverse: unbounded domain needs a closed form");
  const double ly = y > 0 ? std::log(y) : -INFINITY;
  auto above = [&](double t) {
    double x = logscale ? std::exp(t) : t;
    double v = y > 0 ? log_value(x) : (*this)(x);
    double target = y > 0 ? ly : y;
    return inc ? v >= target : v <= target;
  };
  for (int it = 0; it < 300 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
    double m = 0.5 * (a + b);
    if (above(m)) {
      b = m;
    } else {
      a = m;
    }
  }
  return logscale ? std::exp(b) : b;
}

std::optional<MonotoneFn> MonotoneFn::analytic_inverse() const {
  if (kind_ != Kind::expression) return std::nullopt;
  auto inv = expr::invert(expr_);
  if (!inv) return std::nullopt;
  double a = (*this)(lo_), b = (*this)(hi_);
  return MonotoneFn::expression(*inv, mono_, std::min(a, b), std::max(a, b),
                                name_.empty() ? "" : "inverse of " + name_);
}

MonotoneFn MonotoneFn::compose(const MonotoneFn& inner) const {
  const Monotonicity m = (increasing() == inner.increasing()) ? Monotonicity::increasing
                                                               : Monotonicity::decreasing;
  if (kind_ == Kind::expression && inner.kind_ == Kind::expression) {
    return expression(expr::compose(expr_, inner.expr_), m, inner.lo_, inner.hi_);
  }
  MonotoneFn outer = *this;
  return callable([outer, inner](double x) { return outer(inner(x)); }, m, inner.lo_, inner.hi_,
                  "", [outer, inner](double x) { return outer.log_value(inner(x)); });
}

MonotoneFn MonotoneFn::dilate(double c) const {
  if (!(c > 0)) throw PreconditionError("dilate: factor must be positive");
  switch (kind_) {
    case Kind::expression:
      return expression(expr::compose(expr_, expr::mul(expr::constant(c), expr::var())), mono_,
                        lo_ / c, hi_ / c, name_);
    case Kind::sampled: {
      MonotoneFn f = *this;
      for (auto& t : f.lx_) t -= std::log(c);
      f.lo_ /= c;
      f.hi_ /= c;
      return f;
    }
    case Kind::step: {
      std::vector<double> p = step_->points();
      for (auto& x : p) x /= c;
      return step(StepFn(step_->left_value(), p, step_->values()), lo_ / c, hi_ / c, name_);
    }
    case Kind::callable: {
      MonotoneFn f = *this;
      return callable([f, c](double x) { return f(c * x); }, mono_, lo_ / c, hi_ / c, name_,
                      [f, c](double x) { return f.log_value(c * x); });
    }
  }
  return *this;
}

MonotoneFn MonotoneFn::restrict(double lo, double hi) const {
  if (lo < lo_ || hi > hi_ || !(lo < hi)) {
    throw PreconditionError("restrict: window not inside the domain");
  }
  MonotoneFn f = *this;
  f.lo_ = lo;
  f.hi_ = hi;
  return f;
}

std::string MonotoneFn::describe() const {
  if (!name_.empty()) return name_;
  switch (kind_) {
    case Kind::expression:
      return expr::to_string(expr_);
    case Kind::sampled:
      return "sampled(" + std::to_string(lx_.size()) + " points)";
    case Kind::step:
      return "step(" + std::to_string(step_->size()) + " jumps)";
    case Kind::callable:
      return "callable";
  }
  return "?";
}

nlohmann::json MonotoneFn::to_json() const {
  nlohmann::json j{{"domain", {lo_, hi_}},
                   {"direction", increasing() ? "increasing" : "decreasing"},
                   {"name", name_}};
  switch (kind_) {
    case Kind::expression:
      j["kind"] = "expression";
      j["expr"] = expr::to_json(expr_);
      break;
    case Kind::sampled: {
      j["kind"] = "sampled";
      std::vector<double> x, y;
      for (std::size_t i = 0; i < lx_.size(); ++i) {
        x.push_back(std::exp(lx_[i]));
        y.push_back(std::exp(ly_[i]));
      }
      j["x"] = x;
      j["y"] = y;
      break;
    }
    case Kind::step:
      j["kind"] = "step";
      j["step"] = step_->to_json();
      break;
    case Kind::callable:
      j["kind"] = "callable";
      break;
  }
  return j;
}

MonotoneFn MonotoneFn::from_json(const nlohmann::json& j) {
  std::string kind = j.value("kind", "expression");
  std::string name = j.value("name", "");
  if (kind == "sampled") {
    return sampled(j.at("x").get<std::vector<double>>(), j.at("y").get<std::vector<double>>(), name);
  }
  if (kind == "step") {
    auto d = j.at("domain").get<std::vector<double>>();
    return step(StepFn::from_json(j.at("step")), d.at(0), d.at(1), name);
  }
  if (kind != "expression") throw PreconditionError("monotone function: cannot load kind '" + kind + "'");
  auto d = j.at("domain").get<std::vector<double>>();
  Monotonicity m = j.value("direction", "increasing") == "increasing" ? Monotonicity::increasing
                                                                     : Monotonicity::decreasing;
  return expression(expr::from_json(j.at("expr")), m, d.at(0), d.at(1), name);
}

}  // namespace isospec

#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "isospec/step_fn.hpp"

namespace isospec {

/// Closed-form expression tree in one variable. Nodes are immutable and
/// shared; evaluation goes through (sign, log|value|) so that towers such as
/// exp(exp(x)) or exp(-x^{-1/2}) near 0 neither overflow nor underflow.
struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  enum class Kind { var, constant, add, mul, pow, exp, log };
  Kind kind;
  double c = 0;  // constant value or power exponent
  Expr a, b;
};

namespace expr {
Expr var();
Expr constant(double c);
Expr add(Expr a, Expr b);
Expr mul(Expr a, Expr b);
Expr pow(Expr a, double p);
Expr exp(Expr a);
Expr log(Expr a);
Expr neg(Expr a);
Expr div(Expr a, Expr b);
/// f(g(x))
Expr compose(const Expr& f, const Expr& g);
/// exp applied k times / log applied k times to `a`.
Expr iterate_exp(Expr a, int k);
Expr iterate_log(Expr a, int k);

struct SignedLog {
  int sign = 0;  // -1, 0, +1
  double log_abs = -INFINITY;
};
SignedLog eval_log(const Expr& e, double x);
double eval(const Expr& e, double x);
/// Forward-mode derivative.
double derivative(const Expr& e, double x);
/// Inverse of a chain of invertible unary steps around the variable
/// (powers, exp, log, scaling and shifting by constants); nullopt otherwise.
std::optional<Expr> invert(const Expr& e);

std::string to_string(const Expr& e);
nlohmann::json to_json(const Expr& e);
Expr from_json(const nlohmann::json& j);
}  // namespace expr

/// A monotone function on an explicit domain [lo, hi], held as a closed-form
/// expression, a sampled table (log-log interpolation), a right-continuous
/// step function, or an opaque callable.
class MonotoneFn {
 public:
  enum class Kind { expression, sampled, step, callable };

  static MonotoneFn expression(Expr e, Monotonicity m, double lo, double hi,
                               std::string name = "");
  /// Table with x strictly increasing and y > 0; monotonicity is read off the
  /// table and must be consistent.
  static MonotoneFn sampled(std::vector<double> x, std::vector<double> y, std::string name = "");
  static MonotoneFn step(StepFn f, double lo, double hi, std::string name = "");
  static MonotoneFn callable(std::function<double(double)> f, Monotonicity m, double lo,
                             double hi, std::string name = "",
                             std::function<double(double)> log_f = {});

  double operator()(double x) const;
  double log_value(double x) const;
  double derivative(double x) const;

  Kind kind() const { return kind_; }
  Monotonicity monotonicity() const { return mono_; }
  bool increasing() const { return mono_ == Monotonicity::increasing; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::string& name() const { return name_; }
  const Expr& expression() const { return expr_; }
  const StepFn* step_function() const { return step_ ? step_.get() : nullptr; }

  /// Increasing: the x with f(x) = y. Decreasing: the generalized inverse
  /// inf{v in [lo, hi] : f(v) <= y}. Analytic for invertible expression
  /// chains, bisection in log x otherwise. Throws PreconditionError when y is
  /// not attained on the domain.
  double inverse(double y) const;
  /// Expression-backed inverse with the image domain, when available.
  std::optional<MonotoneFn> analytic_inverse() const;

  /// x -> this(inner(x)); domain taken from `inner`.
  MonotoneFn compose(const MonotoneFn& inner) const;
  /// x -> this(c x) on [lo/c, hi/c].
  MonotoneFn dilate(double c) const;
  /// Restrict the domain.
  MonotoneFn restrict(double lo, double hi) const;

  std::string describe() const;
  nlohmann::json to_json() const;
  /// Expression and sampled representations only.
  static MonotoneFn from_json(const nlohmann::json& j);

 private:
  Kind kind_ = Kind::callable;
  Monotonicity mono_ = Monotonicity::increasing;
  double lo_ = 0, hi_ = INFINITY;
  std::string name_;
  Expr expr_;
  std::vector<double> lx_, ly_;  // sampled: log x, log y
  std::shared_ptr<const StepFn> step_;
  std::function<double(double)> fn_, log_fn_;
};

}  // namespace isospec

#pragma once

#include <cstddef>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include <json.hpp>

namespace isospec {

enum class Monotonicity { increasing, decreasing };

/// Right-continuous monotone step function. f(x) = left_value for x below
/// the first jump point, f(x) = values[i] on [points[i], points[i+1]).
class StepFn {
 public:
  StepFn() = default;
  StepFn(double left_value, std::vector<double> points, std::vector<double> values);

  /// x -> (sum of weights with sample <= x) / total, e.g. a normalized
  /// eigenvalue counting function. Equal samples merge into one jump.
  static StepFn counting(std::vector<double> samples, double total = 0,
                         std::span<const double> weights = {});

  double operator()(double x) const;
  double left_limit(double x) const;
  double left_value() const { return left_; }
  const std::vector<double>& points() const { return points_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return points_.size(); }
  Monotonicity monotonicity() const { return mono_; }
  /// f(points[i]) - f(points[i]-)
  double jump(std::size_t i) const;

  /// Decreasing functions: inf{v : f(v) <= x}. Increasing: inf{v : f(v) >= x}.
  /// Throws PreconditionError when no point of the table qualifies.
  double generalized_inverse(double x) const;

  /// sum f(x_i) * jump(x_i) over jump points in [a, b].
  double stieltjes(const std::function<double(double)>& f, double a, double b) const;

  nlohmann::json to_json() const;
  static StepFn from_json(const nlohmann::json& j);

 private:
  double left_ = 0;
  std::vector<double> points_;
  std::vector<double> values_;
  Monotonicity mono_ = Monotonicity::increasing;
};

}  // namespace isospec

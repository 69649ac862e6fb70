#include "isospec/step_fn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "isospec/errors.hpp"

namespace isospec {

StepFn::StepFn(double left_value, std::vector<double> points, std::vector<double> values)
    : left_(left_value), points_(std::move(points)), values_(std::move(values)) {
  if (points_.size() != values_.size()) {
    throw PreconditionError("step function: points and values differ in length");
  }
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i - 1] < points_[i])) {
      throw PreconditionError("step function: jump points must be strictly increasing");
    }
  }
  bool inc = true, dec = true;
  double prev = left_;
  for (double v : values_) {
    if (v < prev) inc = false;
    if (v > prev) dec = false;
    prev = v;
  }
  if (!inc && !dec) throw PreconditionError("step function: values are not monotone");
  mono_ = inc ? Monotonicity::increasing : Monotonicity::decreasing;
}

StepFn StepFn::counting(std::vector<double> samples, double total,
                        std::span<const double> weights) {
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return samples[a] < samples[b]; });
  auto w = [&](std::size_t i) { return weights.empty() ? 1.0 : weights[i]; };
  if (total <= 0) {
    total = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) total += w(i);
  }
  std::vector<double> pts, vals;
  double acc = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    acc += w(order[k]);
    double x = samples[order[k]];
    if (!pts.empty() && pts.back() == x) {
      vals.back() = acc / total;
    } else {
      pts.push_back(x);
      vals.push_back(acc / total);
    }
  }
  return StepFn(0.0, std::move(pts), std::move(vals));
}

double StepFn::operator()(double x) const {
  auto it = std::upper_bound(points_.begin(), points_.end(), x);
  if (it == points_.begin()) return left_;
  return values_[it - points_.begin() - 1];
}

double StepFn::left_limit(double x) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), x);
  if (it == points_.begin()) return left_;
  return values_[it - points_.begin() - 1];
}

double StepFn::jump(std::size_t i) const {
  return values_[i] - (i == 0 ? left_ : values_[i - 1]);
}

double StepFn::generalized_inverse(double x) const {
  if (mono_ == Monotonicity::decreasing) {
    if (left_ <= x) return 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (values_[i] <= x) return points_[i];
    }
    throw PreconditionError("generalized inverse: level " + std::to_string(x) +
                            " is below every value of the table");
  }
  if (left_ >= x) return -INFINITY;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (values_[i] >= x) return points_[i];
  }
  throw PreconditionError("generalized inverse: level " + std::to_string(x) +
                          " is above every value of the table");
}

double StepFn::stieltjes(const std::function<double(double)>& f, double a, double b) const {
  double s = 0;
  auto lo = std::lower_bound(points_.begin(), points_.end(), a);
  auto hi = std::upper_bound(points_.begin(), points_.end(), b);
  for (auto it = lo; it != hi; ++it) {
    std::size_t i = it - points_.begin();
    s += f(points_[i]) * jump(i);
  }
  return s;
}

nlohmann::json StepFn::to_json() const {
  return {{"left_value", left_}, {"points", points_}, {"values", values_}};
}

StepFn StepFn::from_json(const nlohmann::json& j) {
  return StepFn(j.at("left_value").get<double>(), j.at("points").get<std::vector<double>>(),
                j.at("values").get<std::vector<double>>());
}

}  // namespace isospec

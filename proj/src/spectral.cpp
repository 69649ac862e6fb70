#include "isospec/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "isospec/errors.hpp"

namespace isospec {

DirichletOperator::DirichletOperator(const Measure& mu, std::vector<Element> omega)
    : omega_(std::move(omega)) {
  if (omega_.empty()) throw PreconditionError("Dirichlet operator: Omega is empty");
  const Group& G = mu.group();
  ElementMap<std::size_t> index;
  index.reserve(omega_.size() * 2);
  for (std::size_t i = 0; i < omega_.size(); ++i) {
    G.validate(omega_[i]);
    if (!index.emplace(omega_[i], i).second) {
      throw PreconditionError("Dirichlet operator: duplicate element " + G.format(omega_[i]));
    }
    if (G.is_identity(omega_[i])) identity_ = static_cast<std::int64_t>(i);
  }
  const auto w = mu.float_weights();
  double hold = 0;
  std::vector<Element> inv;
  std::vector<double> wt;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    if (G.is_identity(mu.support()[k])) {
      hold = w[k];
    } else {
      inv.push_back(G.inverse(mu.support()[k]));
      wt.push_back(w[k]);
    }
  }
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(omega_.size() * (inv.size() + 1));
  for (std::size_t i = 0; i < omega_.size(); ++i) {
    trip.emplace_back(i, i, 1.0 - hold);
    for (std::size_t k = 0; k < inv.size(); ++k) {
      auto it = index.find(G.multiply(omega_[i], inv[k]));
      if (it != index.end()) trip.emplace_back(i, it->second, -wt[k]);
    }
  }
  delta_.resize(omega_.size(), omega_.size());
  delta_.setFromTriplets(trip.begin(), trip.end());
  delta_.makeCompressed();
}

std::vector<double> DirichletOperator::row_sums() const {
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(delta_.cols());
  Eigen::VectorXd s = delta_ * ones;
  return {s.data(), s.data() + s.size()};
}

nlohmann::json SpectrumSummary::to_json() const {
  return {{"size", size}, {"lambda1", lambda1}, {"eigenvalues", eigenvalues}};
}

SpectrumSummary spectrum(const DirichletOperator& op, std::size_t dense_cap) {
  SpectrumSummary s;
  s.eigenvalues = symmetric_eigenvalues(op.matrix(), dense_cap);
  s.size = s.eigenvalues.size();
  s.lambda1 = s.eigenvalues.front();
  return s;
}

Lambda1 lambda1(const DirichletOperator& op, std::size_t dense_cap, double rel_tol) {
  Lambda1 r;
  if (op.size() <= dense_cap) {
    r.value = symmetric_eigenvalues(op.matrix(), dense_cap).front();
    r.method = "dense";
    return r;
  }
  auto e = smallest_eigenvalue(op.matrix(), rel_tol);
  r.value = e.value;
  r.method = "lanczos";
  r.residual = e.residual;
  r.iterations = e.iterations;
  return r;
}

EmpiricalSpectralDistribution esd_from_eigenvalues(std::vector<double> eigenvalues,
                                                   std::span<const double> weights,
                                                   std::string label) {
  if (eigenvalues.empty()) throw PreconditionError("ESD: no eigenvalues");
  EmpiricalSpectralDistribution e;
  double norm = 0, total = 0;
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    norm = std::max(norm, std::abs(eigenvalues[i]));
    total += weights.empty() ? 1.0 : weights[i];
  }
  e.tolerance = 1e-12 * norm;
  e.size = static_cast<std::size_t>(std::llround(total));
  e.label = std::move(label);
  e.counting = StepFn::counting(std::move(eigenvalues), total, weights);
  return e;
}

EmpiricalSpectralDistribution esd(const DirichletOperator& op, std::size_t dense_cap) {
  return esd_from_eigenvalues(symmetric_eigenvalues(op.matrix(), dense_cap), {},
                              "|Omega|=" + std::to_string(op.size()));
}

StepFn EmpiricalSpectralDistribution::as_step() const {
  std::vector<double> p(counting.points());
  for (auto& x : p) x -= tolerance;
  return StepFn(counting.left_value(), std::move(p), counting.values());
}

nlohmann::json EmpiricalSpectralDistribution::to_json() const {
  return {{"size", size},
          {"tolerance", tolerance},
          {"label", label},
          {"jumps", counting.points()},
          {"values", counting.values()}};
}

MomentPair moment_consistency(const DirichletOperator& op, const SpectrumSummary& spec, int t) {
  if (t < 0) throw PreconditionError("moment consistency: t must be nonnegative");
  if (op.identity_index() < 0) throw PreconditionError("moment consistency: e not in Omega");
  MomentPair r;
  r.t = t;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(op.size());
  v[op.identity_index()] = 1.0;
  for (int s = 0; s < t; ++s) v = v - op.matrix() * v;
  r.killed = v.squaredNorm();
  double acc = 0;
  for (double l : spec.eigenvalues) acc += std::pow(1 - l, 2 * t);
  r.trace = acc / static_cast<double>(spec.eigenvalues.size());
  return r;
}

std::string to_string(TwoTails t) {
  switch (t) {
    case TwoTails::holds:
      return "holds";
    case TwoTails::fails:
      return "fails";
    case TwoTails::inconclusive:
      return "inconclusive";
  }
  return "?";
}

TwoTailsResult two_tails_from_eigenvalues(std::span<const double> a, double lambda,
                                          double collision) {
  if (!(lambda >= 0 && lambda <= 1)) throw PreconditionError("two tails: lambda outside [0, 1]");
  TwoTailsResult r;
  const double s = std::sqrt(1 - lambda);
  const double lo = 1 - s, hi = 1 + s;
  std::size_t below_lo = 0, below_hi = 0;
  for (double x : a) {
    if (std::abs(x) > 1 + 1e-12) throw PreconditionError("two tails: ||A|| > 1");
    const double sq = 1 - x * x, lin = 1 - x;
    if (sq <= lambda) ++r.lhs;
    if (lin <= lo) ++below_lo;
    if (lin <= hi) ++below_hi;
    r.closest = std::min({r.closest, std::abs(sq - lambda), std::abs(lin - lo), std::abs(lin - hi)});
  }
  r.rhs = below_lo + a.size() - below_hi;
  if (r.closest < collision) {
    r.status = TwoTails::inconclusive;
  } else {
    r.status = r.lhs == r.rhs ? TwoTails::holds : TwoTails::fails;
  }
  return r;
}

TwoTailsResult two_tails_check(const Eigen::MatrixXd& a, double lambda, double collision) {
  if (a.rows() != a.cols()) throw PreconditionError("two tails: matrix not square");
  if (!a.isApprox(a.transpose(), 0.0) && (a - a.transpose()).cwiseAbs().maxCoeff() > 1e-14) {
    throw PreconditionError("two tails: matrix not symmetric");
  }
  auto eig = dense_eigenvalues(a);
  return two_tails_from_eigenvalues(eig, lambda, collision);
}

double stieltjes_integral(const std::function<double(double)>& f, const StepFn& F, double a,
                          double b) {
  return F.stieltjes(f, a, b);
}

std::vector<ComparisonReport> compare_measures(const Measure& mu1, const Measure& mu2,
                                               const std::vector<std::vector<Element>>& family,
                                               Window window, const ComparisonOptions& options) {
  if (!(mu1.group().spec() == mu2.group().spec())) {
    throw PreconditionError("compare measures: measures live on different groups");
  }
  ComparisonOptions o = options;
  o.dilatational = true;
  std::vector<ComparisonReport> out;
  for (const auto& omega : family) {
    auto e1 = esd(DirichletOperator(mu1, omega));
    auto e2 = esd(DirichletOperator(mu2, omega));
    auto rep = simeq([&](double x) { return std::log(e1(x)); },
                     [&](double x) { return std::log(e2(x)); }, Direction::near_zero, window, o,
                     "ESD[" + mu1.label() + "]", "ESD[" + mu2.label() + "]");
    out.push_back(std::move(rep));
  }
  return out;
}

}  // namespace isospec

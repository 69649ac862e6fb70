#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "isospec/comparison.hpp"
#include "isospec/eigen_solvers.hpp"
#include "isospec/group.hpp"
#include "isospec/step_fn.hpp"
#include "isospec/walk.hpp"

namespace isospec {

/// Delta = id - R_mu on functions supported in a finite set Omega:
/// diagonal 1 - mu(e), entry -mu(g) between x and x g^{-1}.
class DirichletOperator {
 public:
  /// Omega keeps the given order (duplicates rejected).
  DirichletOperator(const Measure& mu, std::vector<Element> omega);

  std::size_t size() const { return omega_.size(); }
  const std::vector<Element>& elements() const { return omega_; }
  const SparseMatrix& matrix() const { return delta_; }
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(delta_); }
  /// Index of the identity in Omega, or -1.
  std::int64_t identity_index() const { return identity_; }
  std::vector<double> row_sums() const;

 private:
  std::vector<Element> omega_;
  SparseMatrix delta_;
  std::int64_t identity_ = -1;
};

struct SpectrumSummary {
  std::vector<double> eigenvalues;  // ascending
  double lambda1 = 0;
  std::size_t size = 0;
  nlohmann::json to_json() const;
};

SpectrumSummary spectrum(const DirichletOperator& op, std::size_t dense_cap = 4000);

struct Lambda1 {
  double value = 0;
  std::string method;  // "dense" or "lanczos"
  double residual = 0;
  int iterations = 0;
};

/// Dense solver up to `dense_cap` rows, shift-invert Lanczos beyond.
Lambda1 lambda1(const DirichletOperator& op, std::size_t dense_cap = 4000, double rel_tol = 1e-10);

/// lambda -> #{eigenvalues <= lambda + tolerance} / size.
struct EmpiricalSpectralDistribution {
  StepFn counting;
  std::size_t size = 0;
  double tolerance = 0;
  std::string label;

  double operator()(double lambda) const { return counting(lambda + tolerance); }
  /// Jump points shifted to the counting convention, for Stieltjes sums.
  StepFn as_step() const;
  nlohmann::json to_json() const;
};

/// Tolerance 1e-12 * max |eigenvalue|.
EmpiricalSpectralDistribution esd_from_eigenvalues(std::vector<double> eigenvalues,
                                                   std::span<const double> weights = {},
                                                   std::string label = "");
EmpiricalSpectralDistribution esd(const DirichletOperator& op, std::size_t dense_cap = 4000);

struct MomentPair {
  int t = 0;
  double killed = 0;  // <delta_e, (I - Delta_Omega)^{2t} delta_e>
  double trace = 0;   // (1/|Omega|) sum_i (1 - lambda_i)^{2t}
};

MomentPair moment_consistency(const DirichletOperator& op, const SpectrumSummary& spec, int t);

enum class TwoTails { holds, fails, inconclusive };
std::string to_string(TwoTails t);

struct TwoTailsResult {
  TwoTails status = TwoTails::inconclusive;
  std::size_t lhs = 0;  // rank of the projection of I - A^2 at lambda
  std::size_t rhs = 0;  // rank at 1 - sqrt(1 - lambda) of I - A, plus n minus rank at 1 + sqrt(1 - lambda)
  double closest = INFINITY;  // distance of an eigenvalue to a threshold
};

/// Eigenvalue-count check of
///   E^{I-A^2}_lambda = E^{I-A}_{1-sqrt(1-lambda)} + I - E^{I-A}_{1+sqrt(1-lambda)}
/// for symmetric A with ||A|| <= 1 and lambda in [0, 1].
TwoTailsResult two_tails_check(const Eigen::MatrixXd& a, double lambda, double collision = 1e-9);
/// Same with the eigenvalues of A given.
TwoTailsResult two_tails_from_eigenvalues(std::span<const double> a_eigenvalues, double lambda,
                                          double collision = 1e-9);

/// sum f(x_i) * jump(F, x_i) over jump points in [a, b].
double stieltjes_integral(const std::function<double(double)>& f, const StepFn& F, double a,
                          double b);

/// ESDs of both measures on each set of the family, compared
/// dilatationally on `window`. One report per set, in family order.
std::vector<ComparisonReport> compare_measures(const Measure& mu1, const Measure& mu2,
                                               const std::vector<std::vector<Element>>& family,
                                               Window window,
                                               const ComparisonOptions& options = {});

}  // namespace isospec

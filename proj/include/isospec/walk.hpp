#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "isospec/group.hpp"

namespace isospec {

/// Finitely supported symmetric probability measure with exact weights.
class Measure {
 public:
  /// Validates positivity, total mass exactly 1 and symmetry. Throws
  /// PreconditionError naming the offending element pair otherwise.
  static Measure from_weights(const Group& group,
                              std::vector<std::pair<Element, mpq_class>> weights,
                              std::string label = "custom");

  const Group& group() const { return group_; }
  const std::vector<Element>& support() const { return support_; }
  const std::vector<mpq_class>& weights() const { return weights_; }
  std::size_t size() const { return support_.size(); }
  const std::string& label() const { return label_; }

  std::vector<double> float_weights() const;
  /// Least common denominator D of the weights; weights()[k] * D are integers.
  const mpz_class& denominator() const { return denominator_; }
  const std::vector<mpz_class>& scaled_weights() const { return scaled_; }

  mpq_class weight_of(const Element& g) const;
  /// Support (minus the identity) reaches every element of the standard
  /// ball B(2) with words of length <= 4.
  bool generating() const { return generating_; }
  /// Largest word length of a support element in the standard generators.
  int max_word_length() const { return max_len_; }

  nlohmann::json to_json() const;

 private:
  Measure(Group g) : group_(std::move(g)) {}
  Group group_;
  std::vector<Element> support_;
  std::vector<mpq_class> weights_;
  std::vector<mpz_class> scaled_;
  mpz_class denominator_;
  bool generating_ = false;
  int max_len_ = 0;
  std::string label_;
};

/// Uniform measure on a symmetric generating set.
Measure srw_measure(const Group& group, const GeneratingSet& gens);
/// Holding probability `hold` at the identity, the rest uniform on S.
Measure lazy_measure(const Group& group, const GeneratingSet& gens, const mpq_class& hold);
/// Uniform on an explicitly listed symmetric set (identity allowed).
Measure uniform_measure(const Group& group, std::span<const Element> elements);
/// Builds a measure from {"kind": "srw"|"lazy"|"uniform"|"weights", ...}.
Measure measure_from_json(const Group& group, const nlohmann::json& j);

/// delta_e * mu^{*t} with a common power-of-D denominator.
struct ExactDistribution {
  int step = 0;
  std::vector<Element> support;  // canonical order
  std::vector<mpz_class> numerators;
  mpz_class denominator = 1;

  mpq_class at(const Element& g) const;
  mpq_class mass() const;
};

struct FloatDistribution {
  int step = 0;
  std::vector<Element> support;  // canonical order
  std::vector<double> values;

  double at(const Element& g) const;
  double mass() const;
};

struct ConvolveOptions {
  std::size_t support_cap = 50'000'000;
  bool parallel = true;
};

ExactDistribution delta_exact(const Group& group);
FloatDistribution delta_float(const Group& group);

/// (dist * mu)(x) = sum_g dist(x g^{-1}) mu(g). Throws ResourceError when the
/// new support would exceed the cap.
ExactDistribution convolve(const ExactDistribution& dist, const Measure& mu,
                           const ConvolveOptions& options = {});
FloatDistribution convolve(const FloatDistribution& dist, const Measure& mu,
                           const ConvolveOptions& options = {});

enum class Arithmetic { automatic, exact, floating };

Arithmetic arithmetic_from_string(const std::string& s);
std::string to_string(Arithmetic a);

struct ReturnOptions {
  Arithmetic mode = Arithmetic::automatic;
  std::size_t support_cap = 50'000'000;
  bool parallel = true;
  /// Use the lattice / central-Fourier kernels when the family allows it.
  bool structured = true;
  /// Automatic mode picks exact arithmetic up to this many steps ...
  int exact_step_limit = 48;
  /// ... and this many lattice/support entries.
  std::size_t exact_support_limit = 2'000'000;
  /// Gauss-Legendre nodes per graded panel for the Heisenberg kernel.
  int fourier_nodes = 8;
};

struct ReturnSeries {
  Arithmetic mode = Arithmetic::exact;
  std::string kernel;
  int requested = 0;
  int achieved = 0;
  bool truncated = false;
  std::vector<mpq_class> exact;  // exact mode only, p(0..achieved)
  std::vector<double> values;    // p(0..achieved)
};

/// p(t) = (delta_e * mu^{*t})(e) for t = 0..T, via p(2s) = sum dist_s(x)^2 and
/// p(2s+1) = sum dist_s(x) dist_{s+1}(x). A support-cap hit returns the
/// prefix computed so far with truncated = true.
ReturnSeries return_probability(const Measure& mu, int T, const ReturnOptions& options = {});

struct McEstimate {
  std::size_t samples = 0;
  std::size_t hits = 0;
  double estimate = 0;
  double std_error = 0;
  double ci_low = 0;  // Wilson 95% interval
  double ci_high = 0;
};

/// Fraction of sampled t-step products equal to the identity; deterministic
/// for a fixed seed.
McEstimate mc_return_probability(const Measure& mu, int t, std::size_t samples,
                                 std::uint64_t seed);

/// Decimal scientific notation with `digits` significant digits.
std::string decimal_string(const mpq_class& q, int digits = 30);

}  // namespace isospec

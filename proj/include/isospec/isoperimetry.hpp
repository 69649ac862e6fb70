#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "isospec/comparison.hpp"
#include "isospec/group.hpp"
#include "isospec/monotone_fn.hpp"
#include "isospec/step_fn.hpp"
#include "isospec/walk.hpp"

namespace isospec {

/// Visits every S-connected set containing e with at most `max_size`
/// elements (Redelmeier's algorithm). With `translation_classes`, which
/// needs a free abelian group, e must also be the lexicographically
/// smallest element, so every translation class is visited exactly once.
/// `visit` returns false to stop early. Returns the number of sets visited.
std::size_t enumerate_connected(const Group& group, std::span<const Element> gens, int max_size,
                                const std::function<bool(const std::vector<Element>&)>& visit,
                                bool translation_classes = false);

/// True when the enumeration may be restricted to translation classes.
bool translation_classes_available(const Group& group);

/// Lambda(v) with both kinds of evidence kept apart.
struct ProfilePoint {
  std::size_t v = 0;
  std::optional<double> exact;  // brute force
  std::optional<double> upper;  // best candidate of size <= v
  std::string method;
  std::string witness_label;
  std::vector<Element> witness;
};

struct ProfileEstimate {
  std::vector<ProfilePoint> points;
  nlohmann::json to_json(const Group& group) const;
};

/// Exact Lambda(v) for v = 1..v_max as the minimum of lambda_1 over
/// connected sets containing e (connectivity through the support of mu).
ProfileEstimate profile_bruteforce(const Measure& mu, int v_max);
/// Minimum of lambda_1 over all subsets of `window` with at most v_max
/// elements, for validating the connected restriction.
ProfileEstimate profile_bruteforce_unrestricted(const Measure& mu, int v_max,
                                                std::span<const Element> window);

struct Candidate {
  std::string label;
  std::size_t size = 0;
  double lambda1 = 0;
};

struct CandidateOptions {
  std::size_t max_size = 40'000;  // explicit sets
  std::size_t dense_cap = 4000;
  int max_count = 60;
};

/// Family candidate sets: boxes for Z^d, {|a|,|b| <= n, |c| <= n^2} for the
/// Heisenberg group, lamp boxes for Z_q wr Z, metric balls otherwise.
std::vector<Candidate> profile_candidate_sets(const Measure& mu, std::size_t v_max,
                                              const CandidateOptions& options = {});
/// Upper bounds: Lambda(v) <= min lambda_1 over candidates with size <= v.
ProfileEstimate profile_candidates(const Measure& mu, std::span<const std::size_t> v_grid,
                                   const CandidateOptions& options = {});

struct CheegerBound {
  double value = 0;  // (1 / 2|S|^2) h^2
  double h = 0;      // inf over subsets of |boundary| / |subset|
  std::vector<Element> argmin;
  bool exhaustive = true;
  std::string method;
};

/// Exhaustive over all subsets when |Omega| <= 20, otherwise over the
/// connected subsets (exact as well, since the ratio of a disjoint union is
/// at least the smallest ratio of its parts) up to `max_sets`.
CheegerBound cheeger_lower(const Group& group, const GeneratingSet& gens,
                           std::span<const Element> omega, std::size_t max_sets = 5'000'000);

struct FolnerValue {
  int r = 0;
  std::size_t value = 0;
  bool exact = false;
  std::string method;
  std::string witness_label;
};

struct FolnerOptions {
  int exact_max_size = 12;
  std::size_t candidate_max_size = 2'000'000;
};

/// Fo(r) = min{|Omega| : |boundary Omega| / |Omega| < 1/r}. Exact by
/// connected-set search when the minimiser has at most exact_max_size
/// elements, otherwise an upper bound from family candidates.
std::vector<FolnerValue> folner_function(const Group& group, const GeneratingSet& gens,
                                         std::span<const int> radii,
                                         const FolnerOptions& options = {});

struct BallFolnerBound {
  int r = 0;
  double value = 0;  // ceil(|B(k)| / 2) with k = floor(r / (4|S|))
  int radius = 0;
  std::size_t ball_size = 0;
};

/// Lower bound on Fo(r) from |d w| / |w| >= 1 / (4 |S| Phi(2|w|)).
/// Throws PreconditionError when the ball does not reach the needed radius.
BallFolnerBound ball_folner_lower(const Ball& ball, int r);

/// exp(kappa (r / (4|S|) - 1)) / 2 with kappa = min_k log|B(k)| / k over the
/// ball's radii, an exponential minorant of the bound above.
struct GrowthTemplate {
  double kappa = 0;
  int radius = 0;
  MonotoneFn F;
};
GrowthTemplate folner_growth_template(const Ball& ball);

struct FolnerCouple {
  int n = 0;
  std::string family;
  std::size_t outer_size = 0, inner_size = 0;
  int distance = 0;
  bool distance_measured = false;  // BFS on explicit sets, else from the construction
  double C = 0, epsilon = 0;       // declared constants
  double lambda1 = 0;
  double alpha = 0;  // lambda1 * n^2
  std::vector<Element> outer, inner;  // kept when explicit

  nlohmann::json to_json() const;
};

struct CoupleOptions {
  std::size_t explicit_cap = 200'000;
  bool keep_sets = false;
};

/// (Omega_n, omega_n) for Z^d ([-2n, 2n]^d, [-n, n]^d), the Heisenberg group
/// ({|a|,|b| <= 2n, |c| <= 4n^2}, {|a|,|b| <= n, |c| <= n^2}) and Z_q wr Z
/// (lamps on [-2n, 2n], cursor in [-2n, 2n] resp. [-n, n]). Throws
/// InvariantError when |Omega| <= C|omega| or d > epsilon n fails.
FolnerCouple folner_couple(const Measure& mu, int n, const CoupleOptions& options = {});

/// d_S(inner, G \ outer) by breadth-first search inside `outer`.
int couple_distance(const Group& group, const GeneratingSet& gens,
                    std::span<const Element> outer, std::span<const Element> inner);

struct SquaringCheck {
  bool pass = false;
  double C = 0;  // smallest C on the grid with F(Cr) >= F(r)^2 on [r_lo, r_hi / C]
  std::string detail;
};

/// Searches C in (1, C_max] on a 0.05 grid.
SquaringCheck squaring_condition(const LogFn& log_F, double r_lo, double r_hi,
                                 double C_max = 4.0);

struct BoundTemplate {
  bool accepted = false;
  std::string reason;
  SquaringCheck squaring;
  double alpha = 0;
  std::optional<MonotoneFn> fn;  // lambda -> 1 / F(lambda^{-1/2})

  nlohmann::json to_json() const;
};

struct TemplateOptions {
  double C_max = 4.0;
  /// With false, a failed squaring check is recorded but the template is
  /// still produced.
  bool require_squaring = true;
};

/// Lower template for N from couples n = 1..n_max: F is the piecewise linear
/// extension of n -> |Omega_n|. alpha <= 0 means the measured max lambda_1 n^2.
BoundTemplate n_lower_from_couples(std::span<const FolnerCouple> couples, double alpha = 0,
                                   const TemplateOptions& options = {});

/// Upper template for N from an increasing F with Fo >= F, checked on the
/// radii window.
BoundTemplate n_upper_from_folner(const MonotoneFn& F, Window radii,
                                  const TemplateOptions& options = {});

}  // namespace isospec

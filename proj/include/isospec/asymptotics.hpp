#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "isospec/comparison.hpp"
#include "isospec/monotone_fn.hpp"
#include "isospec/spectral.hpp"
#include "isospec/transforms.hpp"
#include "isospec/walk.hpp"

namespace isospec {

/// power:         y = b x^a          fitted as log y against log x
/// stretched_exp: y = exp(-b x^a)    fitted as log(-log y) against log x
/// log_power:     y = b (log x)^a    fitted as log y against log log x
enum class FitModel { power, stretched_exp, log_power };
std::string to_string(FitModel m);
FitModel fit_model_from_string(const std::string& s);

struct FitResult {
  FitModel model = FitModel::power;
  double exponent = 0;
  double intercept = 0;
  double residual = 0;  // rms in the linearized coordinates
  double decades = 0;   // log10(x_max / x_min)
  std::size_t points = 0;
  nlohmann::json to_json() const;
};

/// Least squares in the model's linearizing coordinates. Throws
/// PreconditionError below `min_decades` of x or for samples outside the
/// model's domain.
FitResult fit_exponent(std::span<const double> x, std::span<const double> y, FitModel model,
                       double min_decades = 2.0);

/// One row of the table of p(2t), N(lambda), Lambda(v) and Fo(r).
struct AsymptoticTemplate {
  int row = 1;
  std::string family;
  double d = 1;  // growth degree where the row has one
  int k = 0;     // iteration depth where the row has one
  Expr p, N, Lambda, Folner;
  Expr neg_log_N;  // -log N, kept apart for tower evaluation
  /// Tower level at which N and 1 / Lambda^{-1} are compared, and the
  /// interval of u = log_(level) v on which Lambda o exp_(level) decreases.
  int level = 1;
  double u_lo = 1e-6, u_hi = 1e6;

  nlohmann::json to_json() const;
};

/// Rows 1, 3, 4 take the degree d; rows 5, 6 the depth k >= 2.
AsymptoticTemplate asymptotic_template(int row, double d = 1, int k = 2);
std::vector<AsymptoticTemplate> template_catalogue();

/// log_(level)(1 / N(lambda)).
double template_tower_N(const AsymptoticTemplate& t, double lambda);
/// log_(level)(Lambda^{-1}(lambda)), i.e. the tower value of 1 / Lambda^{-1}.
double template_tower_inverse(const AsymptoticTemplate& t, double lambda);

/// 1 / Lambda^{-1} against N, dilatational, near zero.
ComparisonReport template_self_consistency(const AsymptoticTemplate& t, Window w = {1e-6, 1e-1},
                                           const ComparisonOptions& options = {});

/// A finite region of the group used for spectral estimates.
struct Region {
  std::string label;
  std::vector<Element> elements;
};

/// Largest family region with at most `cap` elements: a cube for Z^d,
/// {|a|,|b| <= n, |c| <= n^2} for the Heisenberg group, a lamp box for
/// Z_q wr Z and a ball otherwise.
Region largest_region(const Measure& mu, std::size_t cap);

/// ESD on the largest region, or on the lamp box of width `lamp_width` for
/// lamplighter measures that allow the block decomposition.
EmpiricalSpectralDistribution family_esd(const Measure& mu, std::size_t cap = 4000,
                                         int lamp_width = 18);

struct MainFormulaOptions {
  Window lambda_window{3e-2, 3e-1};
  std::size_t esd_cap = 4000;
  int lamp_width = 18;
  std::size_t profile_v_max = 40'000;  // explicit candidate sets
  double lamp_v_max = 1e12;            // lamp boxes are analytic
  int couples = 8;
  int growth_radius = 14;
  /// Lambda o exp counts as doubling when L(2s)/L(s) loses less than this
  /// fraction per decade of s; power laws lose orders of magnitude.
  double doubling_trend_tolerance = 0.5;
  double fit_decades = 1.0;
  double max_D = 10;
  /// Expected ESD exponent; NaN takes the prediction from the profile fit.
  double expected_exponent = NAN;
  double exponent_tolerance = 0.12;
  ComparisonOptions comparison;
};

struct MainFormulaReport {
  std::string route;  // "power-law" or "doubling"
  std::string esd_label;
  DoublingReport doubling;
  FitResult profile_fit;
  FitResult esd_fit;
  double predicted_exponent = 0;
  double expected_exponent = 0;
  ComparisonReport main;  // ESD against 1 / Lambda^{-1}
  std::optional<ComparisonReport> lower, upper;  // one-sided templates
  std::vector<std::string> notes;
  bool pass = false;
  nlohmann::json to_json() const;
};

/// Lambda from candidate sets, its inverse against the ESD, and for the
/// doubling route the couple and growth templates on either side.
MainFormulaReport verify_main_formula(const Measure& mu, const MainFormulaOptions& options = {});

struct LaplaceLinkOptions {
  int t_max = 40;
  double d_lo = 1e-2, d_hi = 1e2;
  int per_decade = 400;
  double factor = 2;
};

struct LaplaceLinkReport {
  std::vector<int> t;
  std::vector<double> p, laplace;  // p(2t) and int exp(-lambda t) dESD
  double D = 0;
  double max_factor = 0;  // max over t of max(r, 1/r), r = p(2t) / laplace(D t)
  bool pass = false;
  std::string esd_label;
  nlohmann::json to_json() const;
};

/// Exact p(2t) against the Laplace transform of the ESD, searching the
/// time dilation D that minimizes the worst ratio.
LaplaceLinkReport verify_laplace_link(const Measure& mu, const EmpiricalSpectralDistribution& esd,
                                      const LaplaceLinkOptions& options = {});

}  // namespace isospec

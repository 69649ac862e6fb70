#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "isospec/monotone_fn.hpp"
#include "isospec/step_fn.hpp"

namespace isospec {

enum class Direction { near_zero, near_infinity };
std::string to_string(Direction d);

struct Window {
  double lo = 0, hi = 0;
};

/// A positive function handed to the comparison search through log f(x).
/// Returning -inf means f(x) = 0; throwing or NaN means "undefined at x".
using LogFn = std::function<double(double)>;

LogFn log_of(const MonotoneFn& f);
LogFn log_of(const StepFn& f);
LogFn log_of(std::function<double(double)> f);

struct ComparisonOptions {
  double c_lo = 1e-3, c_hi = 1e3;
  double d_lo = 1e-3, d_hi = 1e3;
  int grid_per_decade = 25;  // C and D grids
  int x_per_decade = 25;     // evaluation grid on the window
  int min_x_points = 41;
  int verify_factor = 10;    // re-check witnesses on a denser x grid
  /// Force C = 1 and report the valid D closest to 1.
  bool dilatational = false;
  /// Slack in log units when testing log f <= log C + log g(Dx).
  double log_tolerance = 1e-12;
};

/// Witness search for f(x) <= C g(D x) on a window.
struct ComparisonReport {
  std::string relation;  // "preceq" / "simeq", optionally dilatational
  Direction direction = Direction::near_zero;
  Window window;
  bool dilatational = false;
  int level = 0;  // 0: compared through log f; k >= 1: through log_(k)(1/f)
  bool holds = false;
  double C = 0, D = 0;
  bool verified = false;  // witness re-checked on the dense grid
  std::size_t grid_points = 0, dense_points = 0;
  // Refutation: where the best candidate fails, and by how much (log units).
  std::optional<double> refutation_x;
  double refutation_excess = 0;
  std::string f_name, g_name;
  std::vector<ComparisonReport> parts;  // simeq: forward and backward

  nlohmann::json to_json() const;
};

/// Searches (C, D) on log grids for log f(x) <= log C + log g(Dx) at every
/// grid point of the window. Among witnesses, smallest C wins, then the D
/// closest to 1. In dilatational mode C = 1.
ComparisonReport preceq(const LogFn& log_f, const LogFn& log_g, Direction dir, Window w,
                        const ComparisonOptions& options = {}, std::string f_name = "f",
                        std::string g_name = "g");
ComparisonReport simeq(const LogFn& log_f, const LogFn& log_g, Direction dir, Window w,
                       const ComparisonOptions& options = {}, std::string f_name = "f",
                       std::string g_name = "g");

/// Dilatational comparison for functions too small for doubles. The inputs
/// return T(x) = log_(k)(1/f(x)) for a fixed k >= 1 (k-fold logarithm), so
/// f(x) <= g(Dx) iff T_f(x) >= T_g(Dx).
ComparisonReport preceq_tower(const LogFn& tower_f, const LogFn& tower_g, int level,
                              Direction dir, Window w, const ComparisonOptions& options = {},
                              std::string f_name = "f", std::string g_name = "g");
ComparisonReport simeq_tower(const LogFn& tower_f, const LogFn& tower_g, int level,
                             Direction dir, Window w, const ComparisonOptions& options = {},
                             std::string f_name = "f", std::string g_name = "g");

/// n log-spaced points covering [lo, hi] inclusive at `per_decade` density.
std::vector<double> log_grid(double lo, double hi, int per_decade, int min_points = 2);

}  // namespace isospec

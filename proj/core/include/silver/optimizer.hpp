#pragma once

// Riemannian gradient descent x_{n+1} = exp_{x_n}(-(eta_n / L) grad f(x_n)),
// the restart driver, and empirical checks of the convergence bounds.

#include "silver/manifolds.hpp"
#include "silver/objectives.hpp"
#include "silver/schedules.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace silver {

enum class RunStatus { completed, diverged, degenerate_stop };

const char* to_string(RunStatus s) noexcept;

/// Value or squared gradient norm above this counts as divergence.
inline constexpr double kDivergenceThreshold = 1e100;

struct Trajectory {
  /// Stored iterates; points[j] is iterate point_index[j]. Iterate 0 and the
  /// last iterate are always stored.
  std::vector<Point> points;
  std::vector<std::uint64_t> point_index;
  /// Per iterate (updates() + 1 entries).
  std::vector<double> values;
  std::vector<double> grad_norm_sq;
  /// Squared distance to the objective's reference; empty when not tracked.
  std::vector<double> dist_sq;
  /// Per update: eta_i / L.
  std::vector<double> applied_steps;
  RunStatus status = RunStatus::completed;
  /// Index of the update that failed (diverged / degenerate_stop); equals
  /// updates() when completed.
  std::uint64_t stop_index = 0;
  std::string stop_reason;

  std::uint64_t updates() const noexcept { return applied_steps.size(); }
  const Point& first_point() const { return points.front(); }
  const Point& last_point() const { return points.back(); }
  /// Stored point for iterate i; throws ContractViolation if it was thinned out.
  const Point& point_at(std::uint64_t i) const;
};

struct RunOptions {
  /// Store every thin-th iterate. 0 picks 1 for d <= 256 and 16 above.
  std::uint64_t thin = 0;
  /// Fill Trajectory::dist_sq when the objective can measure it.
  bool track_distance = false;
};

/// Runs n updates with step schedule.applied(i). Never throws on numerical
/// trouble: divergence (non-finite, or value / |grad|^2 above 1e100) and
/// degenerate covariances end the run early with the prefix preserved.
Trajectory rgd_run(const Objective& f, const StepSchedule& schedule, const Point& x0,
                   std::uint64_t n, const RunOptions& options = {});

/// plan.cycles silver blocks of plan.inner_iters steps at scale 1/L, each
/// restarting the schedule index at 0. Throws ContractViolation if the
/// objective declares no strong convexity.
Trajectory restarted_run(const Objective& f, const RestartPlan& plan, const Point& x0,
                         const RunOptions& options = {});

struct BoundReport {
  int k = 0;
  double r_k = 0.0;
  double L = 0.0;
  double d_squared = 0.0;
  double bound = 0.0;     // r_k L D^2
  double achieved = 0.0;  // f(x_n) - f*
  bool satisfied = false; // achieved <= bound + 1e-9 (1 + bound)
  double margin = 0.0;    // bound - achieved
};

/// f(x_n) - f* <= r_k L d^2(x_0, x_*) at n = 2^k - 1. Uses the objective's
/// (possibly extended) distance to its reference and its declared L.
BoundReport check_bound(const Trajectory& traj, const Objective& f, int k);

/// f(x_i) - f_star for every recorded iterate.
std::vector<double> error_curve(const Trajectory& traj, double f_star);
/// Same with f_star from the objective's reference (ContractViolation if none).
std::vector<double> error_curve(const Trajectory& traj, const Objective& f);

/// exp(-log(rho/2) n / kappa^{log_rho 2}): restarted-silver contraction of d^2 after n steps.
double restart_decay_bound(std::uint64_t n, double kappa);

}  // namespace silver

#include "silver/optimizer.hpp"

#include "silver/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace silver {

namespace {

bool runaway(double v) { return !std::isfinite(v) || std::abs(v) > kDivergenceThreshold; }

}  // namespace

const char* to_string(RunStatus s) noexcept {
  switch (s) {
    case RunStatus::completed: return "completed";
    case RunStatus::diverged: return "diverged";
    case RunStatus::degenerate_stop: return "degenerate_stop";
  }
  return "unknown";
}

const Point& Trajectory::point_at(std::uint64_t i) const {
  const auto it = std::lower_bound(point_index.begin(), point_index.end(), i);
  if (it == point_index.end() || *it != i) {
    std::ostringstream os;
    os << "Trajectory: iterate " << i << " was not stored";
    throw ContractViolation(os.str());
  }
  return points[static_cast<std::size_t>(it - point_index.begin())];
}

Trajectory rgd_run(const Objective& f, const StepSchedule& schedule, const Point& x0,
                   std::uint64_t n, const RunOptions& options) {
  if (x0.kind() != f.manifold_kind())
    throw ContractViolation("rgd_run: starting point is not on the objective's manifold");
  const Manifold& mfd = f.manifold();
  const std::uint64_t thin = options.thin != 0 ? options.thin : (x0.dim() <= 256 ? 1 : 16);

  Trajectory t;
  t.values.reserve(n + 1);
  t.grad_norm_sq.reserve(n + 1);
  t.applied_steps.reserve(n);

  bool track = options.track_distance;
  auto record_dist = [&](const Point& x) {
    if (!track) return;
    try {
      t.dist_sq.push_back(f.dist_sq_to_reference(x));
    } catch (const ContractViolation&) {
      // Objective has no reference point.
      track = false;
      t.dist_sq.clear();
    } catch (const Error&) {
      t.dist_sq.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  };

  Point x = x0;
  Tangent g = f.grad(x);
  double gn = mfd.norm_sq(x, g);
  t.points.push_back(x);
  t.point_index.push_back(0);
  t.values.push_back(f.value(x));
  t.grad_norm_sq.push_back(gn);
  record_dist(x);

  auto stop = [&](RunStatus s, std::uint64_t i, std::string why) {
    t.status = s;
    t.stop_index = i;
    t.stop_reason = std::move(why);
  };

  if (runaway(t.values.back()) || runaway(gn)) {
    stop(RunStatus::diverged, 0, "initial value or gradient not finite");
    return t;
  }

  t.stop_index = n;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double step = schedule.applied(i);
    Point next = x;
    double fv = 0.0;
    double next_gn = 0.0;
    Tangent next_g = g;
    try {
      next = mfd.exp(x, g * (-step));
      fv = f.value(next);
      next_g = f.grad(next);
      next_gn = mfd.norm_sq(next, next_g);
    } catch (const DegenerateCovariance& e) {
      stop(RunStatus::degenerate_stop, i, e.what());
      break;
    } catch (const DegenerateMatrix& e) {
      stop(RunStatus::degenerate_stop, i, e.what());
      break;
    } catch (const Error& e) {
      // Non-finite arithmetic surfaces as contract or numerical errors.
      stop(RunStatus::diverged, i, e.what());
      break;
    }

    t.applied_steps.push_back(step);
    t.values.push_back(fv);
    t.grad_norm_sq.push_back(next_gn);
    record_dist(next);
    const std::uint64_t idx = i + 1;
    const bool last = idx == n;
    const bool bad = runaway(fv) || runaway(next_gn);
    if (idx % thin == 0 || last || bad) {
      t.points.push_back(next);
      t.point_index.push_back(idx);
    }
    if (bad) {
      std::ostringstream os;
      os << "value " << fv << ", squared gradient norm " << next_gn << " at iterate " << idx;
      stop(RunStatus::diverged, i, os.str());
      break;
    }
    x = std::move(next);
    g = std::move(next_g);
  }
  // Keep the final iterate even when the loop ended between thinning marks.
  if (t.point_index.back() != t.updates()) {
    t.points.push_back(x);
    t.point_index.push_back(t.updates());
  }
  return t;
}

Trajectory restarted_run(const Objective& f, const RestartPlan& plan, const Point& x0,
                         const RunOptions& options) {
  if (!(f.strong_convexity() > 0.0))
    throw ContractViolation("restarted_run: objective declares no strong convexity");
  const StepSchedule s = restarted_schedule(plan).with_smoothness(f.smoothness());
  return rgd_run(f, s, x0, plan.total(), options);
}

BoundReport check_bound(const Trajectory& traj, const Objective& f, int k) {
  const auto ref = f.reference();
  if (!ref) throw ContractViolation("check_bound: objective has no reference optimum");
  if (k < 1 || k > 62) throw InvalidArgument("check_bound: k out of range");
  const std::uint64_t n = (std::uint64_t{1} << k) - 1;
  if (traj.updates() < n || traj.values.size() <= n) {
    std::ostringstream os;
    os << "check_bound: trajectory has " << traj.updates() << " updates, level " << k << " needs " << n;
    throw ContractViolation(os.str());
  }
  BoundReport r;
  r.k = k;
  r.r_k = rate_r(k);
  r.L = f.smoothness();
  r.d_squared = f.dist_sq_to_reference(traj.first_point());
  r.bound = r.r_k * r.L * r.d_squared;
  r.achieved = traj.values[n] - ref->value;
  r.margin = r.bound - r.achieved;
  r.satisfied = r.achieved <= r.bound + 1e-9 * (1.0 + r.bound);
  return r;
}

std::vector<double> error_curve(const Trajectory& traj, double f_star) {
  std::vector<double> e(traj.values.size());
  std::transform(traj.values.begin(), traj.values.end(), e.begin(),
                 [f_star](double v) { return v - f_star; });
  return e;
}

std::vector<double> error_curve(const Trajectory& traj, const Objective& f) {
  const auto ref = f.reference();
  if (!ref) throw ContractViolation("error_curve: objective has no reference optimum");
  return error_curve(traj, ref->value);
}

double restart_decay_bound(std::uint64_t n, double kappa) {
  const double expo = std::log(2.0) / std::log(kRho);
  return std::exp(-std::log(kRho / 2.0) * static_cast<double>(n) / std::pow(kappa, expo));
}

}  // namespace silver

#pragma once

// Step-size schedules. Entries are unscaled; a run applies entry(i) / L.
//
// The silver schedule doubles by the recursion
//   eta(k+1) = [eta(k), 1 + rho^{k-1}, eta(k)],  eta(1) = [sqrt 2],  rho = 1 + sqrt 2,
// so entry n is peak(v) where v is the number of trailing zero bits of n + 1
// and peak(0) = sqrt 2, peak(v) = 1 + rho^{v-1}.

#include <cstdint>
#include <numbers>
#include <vector>

namespace silver {

inline constexpr double kRho = 1.0 + std::numbers::sqrt2;

enum class ScheduleMode { silver, constant, restarted_silver };

const char* to_string(ScheduleMode mode) noexcept;

class StepSchedule {
 public:
  ScheduleMode mode() const noexcept { return mode_; }
  std::uint64_t size() const noexcept { return size_; }
  double smoothness() const noexcept { return L_; }
  /// Restart block length (restarted mode); equals size() otherwise.
  std::uint64_t block_length() const noexcept { return block_; }

  /// Unscaled step i. Indices past size() extend the pattern: the infinite
  /// silver sequence, the constant, or further restart blocks.
  double entry(std::uint64_t i) const noexcept;
  /// entry(i) / L.
  double applied(std::uint64_t i) const noexcept { return entry(i) / L_; }
  /// Materialized entries. Throws InvalidArgument above 2^26 entries.
  std::vector<double> entries() const;

  StepSchedule with_smoothness(double L) const;

 private:
  friend StepSchedule silver_schedule(int k);
  friend StepSchedule silver_prefix(std::uint64_t n);
  friend StepSchedule constant_schedule(double eta, std::uint64_t n);
  friend StepSchedule restarted_schedule(std::uint64_t block, std::uint64_t cycles);

  StepSchedule(ScheduleMode mode, std::uint64_t size, std::uint64_t block, double eta)
      : mode_(mode), size_(size), block_(block), eta_(eta) {}

  ScheduleMode mode_;
  std::uint64_t size_;
  std::uint64_t block_;
  double eta_;
  double L_ = 1.0;
};

/// Largest silver level.
inline constexpr int kMaxSilverLevel = 40;

/// Level-k silver schedule, 2^k - 1 entries. Throws InvalidArgument unless 1 <= k <= 40.
StepSchedule silver_schedule(int k);
/// First n entries of the infinite silver sequence (any n >= 1).
StepSchedule silver_prefix(std::uint64_t n);
/// n copies of eta. Throws InvalidArgument unless eta > 0 (finite) and n >= 1.
StepSchedule constant_schedule(double eta, std::uint64_t n);
/// `cycles` back-to-back silver prefixes of length `block`.
StepSchedule restarted_schedule(std::uint64_t block, std::uint64_t cycles);

/// Entry n of the infinite silver sequence.
double silver_step(std::uint64_t n) noexcept;
/// Step at the centre of a level-(v+1) block: sqrt 2 for v = 0, else 1 + rho^{v-1}.
double silver_peak(int v) noexcept;

/// Rate constant r_k = 1 / (1 + sqrt(4 rho^{2k} - 3)). Throws InvalidArgument for k < 1.
double rate_r(int k);

struct RestartPlan {
  int k_star = 0;
  std::uint64_t inner_iters = 0;  // 2^{k_star} - 1
  std::uint64_t cycles = 0;
  std::uint64_t total() const noexcept { return inner_iters * cycles; }
};

/// ceil(log_rho kappa) + 1. Throws InvalidArgument unless kappa > 1 (finite).
int restart_level(double kappa);
/// Plan for a strongly convex objective with condition number kappa.
/// Verifies 2 kappa r_{k*} <= 2 / rho.
RestartPlan restart_plan(double kappa, std::uint64_t cycles);

/// Fixed total budget split into equal restart blocks.
struct BudgetSplit {
  int k_star = 0;
  std::uint64_t block = 0;   // divides total, closest to 2^{k_star} - 1
  std::uint64_t cycles = 0;  // total / block
};

/// Picks the divisor of `total` nearest to 2^{k*} - 1 (ties go to the larger block).
BudgetSplit split_budget(double kappa, std::uint64_t total);

StepSchedule restarted_schedule(const RestartPlan& plan);
StepSchedule restarted_schedule(const BudgetSplit& split);

}  // namespace silver

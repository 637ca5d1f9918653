#include "silver/schedules.hpp"

#include "silver/error.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <sstream>

namespace silver {

namespace {

constexpr std::size_t kMaterializeCap = std::size_t{1} << 26;

// peak(v) for v = 0..64; powers of rho by repeated multiplication so every
// level of the recursion sees the same doubles.
const std::array<double, 65>& peak_table() {
  static const std::array<double, 65> table = [] {
    std::array<double, 65> t{};
    t[0] = std::numbers::sqrt2;
    double power = 1.0;
    for (std::size_t v = 1; v < t.size(); ++v) {
      t[v] = 1.0 + power;
      power *= kRho;
    }
    return t;
  }();
  return table;
}

void append_silver(std::vector<double>& out, std::uint64_t n) {
  // Recursive doubling: [block, peak, block].
  if (n == 0) return;
  out.push_back(silver_peak(0));
  int level = 1;
  while (out.size() < n) {
    const std::size_t len = out.size();
    out.push_back(silver_peak(level));
    for (std::size_t i = 0; i < len && out.size() < n; ++i) out.push_back(out[i]);
    ++level;
  }
}

}  // namespace

const char* to_string(ScheduleMode mode) noexcept {
  switch (mode) {
    case ScheduleMode::silver: return "silver";
    case ScheduleMode::constant: return "constant";
    case ScheduleMode::restarted_silver: return "restarted_silver";
  }
  return "unknown";
}

double silver_peak(int v) noexcept {
  if (v < 0) return peak_table()[0];
  if (v > 64) v = 64;
  return peak_table()[static_cast<std::size_t>(v)];
}

double silver_step(std::uint64_t n) noexcept {
  if (n == UINT64_MAX) return silver_peak(64);
  return silver_peak(std::countr_zero(n + 1));
}

double StepSchedule::entry(std::uint64_t i) const noexcept {
  switch (mode_) {
    case ScheduleMode::silver: return silver_step(i);
    case ScheduleMode::constant: return eta_;
    case ScheduleMode::restarted_silver: return silver_step(i % block_);
  }
  return 0.0;
}

std::vector<double> StepSchedule::entries() const {
  if (size_ > kMaterializeCap) {
    std::ostringstream os;
    os << "StepSchedule::entries: refusing to materialize " << size_ << " entries";
    throw InvalidArgument(os.str());
  }
  std::vector<double> out;
  out.reserve(size_);
  switch (mode_) {
    case ScheduleMode::silver:
      append_silver(out, size_);
      break;
    case ScheduleMode::constant:
      out.assign(size_, eta_);
      break;
    case ScheduleMode::restarted_silver: {
      std::vector<double> block;
      append_silver(block, block_);
      for (std::uint64_t c = 0; c < size_ / block_; ++c) out.insert(out.end(), block.begin(), block.end());
      break;
    }
  }
  return out;
}

StepSchedule StepSchedule::with_smoothness(double L) const {
  if (!(L > 0.0) || !std::isfinite(L)) throw InvalidArgument("StepSchedule: smoothness must be positive");
  StepSchedule s = *this;
  s.L_ = L;
  return s;
}

StepSchedule silver_schedule(int k) {
  if (k < 1 || k > kMaxSilverLevel) {
    std::ostringstream os;
    os << "silver_schedule: level " << k << " outside [1, " << kMaxSilverLevel << "]";
    throw InvalidArgument(os.str());
  }
  const std::uint64_t n = (std::uint64_t{1} << k) - 1;
  return StepSchedule(ScheduleMode::silver, n, n, 0.0);
}

StepSchedule silver_prefix(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("silver_prefix: length must be positive");
  return StepSchedule(ScheduleMode::silver, n, n, 0.0);
}

StepSchedule constant_schedule(double eta, std::uint64_t n) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidArgument("constant_schedule: eta must be positive");
  if (n == 0) throw InvalidArgument("constant_schedule: length must be positive");
  return StepSchedule(ScheduleMode::constant, n, n, eta);
}

StepSchedule restarted_schedule(std::uint64_t block, std::uint64_t cycles) {
  if (block == 0 || cycles == 0) throw InvalidArgument("restarted_schedule: block and cycles must be positive");
  return StepSchedule(ScheduleMode::restarted_silver, block * cycles, block, 0.0);
}

StepSchedule restarted_schedule(const RestartPlan& plan) {
  return restarted_schedule(plan.inner_iters, plan.cycles);
}

StepSchedule restarted_schedule(const BudgetSplit& split) {
  return restarted_schedule(split.block, split.cycles);
}

double rate_r(int k) {
  if (k < 1) throw InvalidArgument("rate_r: k must be >= 1");
  const double p = std::pow(kRho, 2.0 * k);
  return 1.0 / (1.0 + std::sqrt(4.0 * p - 3.0));
}

int restart_level(double kappa) {
  if (!(kappa > 1.0) || !std::isfinite(kappa)) {
    std::ostringstream os;
    os << "restart_plan: condition number must exceed 1, got " << kappa;
    throw InvalidArgument(os.str());
  }
  return static_cast<int>(std::ceil(std::log(kappa) / std::log(kRho))) + 1;
}

RestartPlan restart_plan(double kappa, std::uint64_t cycles) {
  const int k = restart_level(kappa);
  if (cycles == 0) throw InvalidArgument("restart_plan: cycles must be positive");
  if (k > 62) throw InvalidArgument("restart_plan: condition number too large for a 64-bit block");
  if (!(2.0 * kappa * rate_r(k) <= 2.0 / kRho)) {
    std::ostringstream os;
    os << "restart_plan: 2 kappa r_k = " << 2.0 * kappa * rate_r(k) << " exceeds 2/rho";
    throw NumericalFailure(os.str());
  }
  RestartPlan plan;
  plan.k_star = k;
  plan.inner_iters = (std::uint64_t{1} << k) - 1;
  plan.cycles = cycles;
  return plan;
}

BudgetSplit split_budget(double kappa, std::uint64_t total) {
  const int k = restart_level(kappa);
  if (total == 0) throw InvalidArgument("split_budget: total must be positive");
  const std::uint64_t target = k > 62 ? UINT64_MAX : (std::uint64_t{1} << k) - 1;
  std::uint64_t best = 1;
  auto consider = [&](std::uint64_t m) {
    const auto gap = [&](std::uint64_t x) { return x > target ? x - target : target - x; };
    if (gap(m) < gap(best) || (gap(m) == gap(best) && m > best)) best = m;
  };
  for (std::uint64_t i = 1; i * i <= total; ++i) {
    if (total % i != 0) continue;
    consider(i);
    consider(total / i);
  }
  return {k, best, total / best};
}

}  // namespace silver

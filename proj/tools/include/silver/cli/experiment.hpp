#pragma once

// Runs a configured experiment and renders its CSV / SVG artifacts.

#include "silver/cli/config.hpp"
#include "silver/optimizer.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace silver::cli {

/// One row of the run CSV.
struct RunRecord {
  std::uint64_t seed = 0;
  std::string arm;
  std::uint64_t iteration = 0;
  std::optional<double> step_size;  // step that produced this iterate; empty at 0
  double value = 0.0;
  double error = 0.0;               // value minus the reference value (value itself if none)
  double grad_norm_sq = 0.0;
  std::optional<double> dist_sq;
  std::string status;               // final status of the (seed, arm) run
};

/// Train / test mean squared error at stored mean-field iterates.
struct MseRecord {
  std::uint64_t seed = 0;
  std::string arm;
  std::uint64_t iteration = 0;
  double train_mse = 0.0;
  double test_mse = 0.0;
};

struct SummaryRow {
  std::string arm;
  std::uint64_t seeds = 0;
  std::uint64_t completed = 0;
  std::uint64_t diverged = 0;
  std::uint64_t degenerate = 0;
  /// Over completed runs only; NaN when none completed.
  double final_error_mean = 0.0;
  double final_error_p2_5 = 0.0;
  double final_error_p97_5 = 0.0;
};

struct ExperimentResult {
  std::vector<RunRecord> rows;
  std::vector<SummaryRow> summary;
  std::vector<MseRecord> mse;  // mean-field only
  /// Every (seed, arm) run diverged.
  bool all_diverged = false;
};

/// Seeds x arms run on `workers` threads (0: one per hardware thread).
/// Output order is (seed, arm) regardless.
ExperimentResult run_experiment(const ExperimentConfig& config, unsigned workers = 0);

/// Linear-interpolation percentile of an unsorted sample, q in [0, 100].
double percentile(std::vector<double> v, double q);

/// Summary recomputed from rows: the last row of each (seed, arm) carries the
/// final error and status. Arms appear in first-seen order.
std::vector<SummaryRow> summarize(const std::vector<RunRecord>& rows);

std::string rows_csv(const std::vector<RunRecord>& rows);
std::vector<RunRecord> parse_rows_csv(const std::string& text);
std::string summary_csv(const std::vector<SummaryRow>& summary);
std::string mse_csv(const std::vector<MseRecord>& mse);

/// Log-y line chart of the per-iteration mean error of each arm over its
/// completed seeds.
std::string render_svg(const std::vector<RunRecord>& rows, const std::string& title);

}  // namespace silver::cli

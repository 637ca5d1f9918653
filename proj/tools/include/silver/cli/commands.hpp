#pragma once

// silverctl subcommands. Each returns a process exit code:
// 0 success, 1 usage / config error, 2 every run diverged, 3 certificate failure.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace silver::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitAllDiverged = 2;
inline constexpr int kExitCertificate = 3;

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool plot = false;
  bool informative = false;
};

struct ScheduleArgs {
  std::optional<int> k;
  std::optional<std::uint64_t> n;
  double L = 1.0;
  bool closed_form = false;
};

struct VerifyArgs {
  std::vector<std::string> suites;
  std::uint64_t samples = 1000;
  std::optional<std::string> manifold;
  std::string objective;
  double scale = 1.0;
  /// Defaults to <out>/verify_report.txt.
  std::optional<std::string> report;
};

struct RunArgs {
  std::string config_path;
  unsigned workers = 0;
};

int cmd_schedule(const ScheduleArgs& args, std::ostream& out, std::ostream& err);
int cmd_run(const RunArgs& args, const GlobalOptions& global, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyArgs& args, const GlobalOptions& global, std::ostream& out, std::ostream& err);
/// `eigenvalues` is a comma-separated list such as "1,1".
int cmd_curvature(const std::string& eigenvalues, std::ostream& out, std::ostream& err);

/// Closed-form label of a silver step: "√2", "2", "2+√2" or "1+ρ^{v}".
std::string closed_form_label(std::uint64_t index);

/// Parses argv and dispatches; argv[0] is the program name.
int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace silver::cli

#pragma once

// Experiment configuration: flat `key = value` text, `#` comments, repeated
// `arm = ...` lines.

#include "silver/objectives.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace silver::cli {

enum class ExperimentKind { bw_potential, rayleigh, meanfield, custom };

const char* to_string(ExperimentKind k) noexcept;

enum class ArmKind { silver, constant, restart };

struct ArmSpec {
  ArmKind kind = ArmKind::silver;
  double eta = 1.0;                    // constant arms
  std::optional<std::uint64_t> cycles; // restart arms; empty means auto
  /// Label used in CSV output, e.g. "constant(1.99)".
  std::string label() const;
};

/// Parses "silver", "constant(eta)", "restart(auto)" or "restart(cycles)".
ArmSpec parse_arm(const std::string& text);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::bw_potential;
  std::int64_t d = 10;
  std::optional<double> kappa;
  std::optional<double> alpha;
  double L = 1.0;
  std::uint64_t n = 1023;
  std::vector<std::uint64_t> seeds{0};
  std::vector<ArmSpec> arms;
  std::string output_dir = "out";
  std::uint64_t thin = 1;
  bool plot = false;
  RayleighKind rayleigh = RayleighKind::wigner;
  MeanFieldTarget target = MeanFieldTarget::sin;
  std::size_t width = 100;
  std::size_t samples = 200;
  double train_fraction = 0.7;

  /// kappa, or L / alpha when only alpha was given.
  double condition_number() const;
};

/// Carries the offending line (0 when not tied to a line) and field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, std::string field, const std::string& message);
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Cross-field checks; parse_config already calls this.
void validate(const ExperimentConfig& c);

}  // namespace silver::cli

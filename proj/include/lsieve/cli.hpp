#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lsieve {

inline constexpr int kExitPass = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;

struct ExperimentConfig {
  std::int64_t d = 5;
  std::int64_t x = 10'000;
  double b_exponent = 1.0;
  /// "all", "non-principal", or a comma-separated list of indices into character_group(d).
  std::string characters = "non-principal";
  /// "ones", "random-complex", "random-real", or a path to a "p re im" file.
  std::string coefficients = "random-complex";
  std::int64_t trials = 1;
  std::uint64_t seed = 1;
  std::optional<double> c_override;
  std::optional<double> sigma_max;
  /// Empty or "-" writes to the output stream.
  std::string output;
  std::string format = "json";
};

/// Throws std::invalid_argument describing the first problem found.
void validate(const ExperimentConfig& config);

const std::vector<std::string>& subcommand_names();

/// Runs one subcommand and writes its report. Returns kExitPass, kExitViolation
/// or kExitUsage (after a one-line diagnostic on err).
int run_subcommand(const std::string& name, const ExperimentConfig& config, std::ostream& out, std::ostream& err);

/// Full command line: argv[0] is ignored. Flags override values from --config.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lsieve

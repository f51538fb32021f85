#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "mfbm/fbm_sim.hpp"
#include "mfbm/montecarlo.hpp"

namespace mfbm::cli {

inline constexpr const char* kVersion = "1.0.0";

enum class Command { kKernelGrid, kSolve, kSimulate, kIngest, kEstimate, kMonteCarlo, kValidate };

std::string to_string(Command command);

/// Effective configuration of one run: defaults, then the config file, then
/// command-line flags, each layer overriding the previous one.
struct RunConfig {
  Command command = Command::kValidate;
  std::map<std::string, std::string> params;

  bool has(const std::string& key) const;
  std::string text(const std::string& key) const;
  double number(const std::string& key) const;
  std::size_t count(const std::string& key) const;
  std::uint64_t seed() const;
  /// "# mfbm <version> command=... key=value ..." without paths or thread count.
  std::string provenance() const;
};

/// Parses argv into a RunConfig. Throws DomainError on invalid input; --help
/// and --version are reported through `help_text` with `exit_now` set.
struct ParseOutcome {
  RunConfig config;
  bool exit_now = false;
  int exit_code = 0;
  std::string message;
};
ParseOutcome parse_run_config(int argc, const char* const* argv);

/// Flat key = value pairs from a TOML-style file. Keys in a [section] apply
/// only to the command of that name.
std::map<std::string, std::string> read_config_file(const std::string& path, Command command);

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
};

std::vector<CheckResult> run_validate(const RunConfig& config);

MonteCarloConfig montecarlo_config(const RunConfig& config);

/// Path CSV reader: '#' comment lines and one optional header line are
/// skipped, the first two columns are time and value.
SampledPath read_path_csv(std::istream& in);
void write_path_csv(std::ostream& out, const SampledPath& path, const std::string& header);

/// Executes a parsed configuration. Data goes to `out` (or the --out file),
/// the JSON record to `out` when --out names a file and to `err` otherwise.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full entry point with the exit-code mapping: 0 success, 1 domain or
/// configuration error, 2 numeric failure.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mfbm::cli

#pragma once

// Command-line front end: configuration parsing and command dispatch.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pspin/emit.hpp"

namespace pspin::cli {

inline constexpr const char* kVersion = "1.0.0";

enum class Command { critical, sweep, gstate, mc_verify, probe, thermo };

const char* to_string(Command c);

/// Bad flags or values; maps to exit code 2.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// `--help` was requested; what() holds the help text.
class HelpRequested : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Either min:max:step (closed interval) or an explicit list.
struct BetaGrid {
  std::string text;
  std::vector<double> values;
};

BetaGrid parse_beta_grid(const std::string& text);

struct RunConfig {
  Command command = Command::critical;
  int p = 3;
  std::optional<BetaGrid> beta_grid;
  int n = 32;
  std::uint64_t seed = 1;
  std::map<std::string, double> tolerances;
  std::string output_path = "-";
  Format format = Format::csv;

  int restarts = 20;
  int max_iters = 2000;
  std::size_t draws = 100000;
  std::size_t sweeps = 2000;
  std::size_t burn_in = 500;
  std::size_t k = 4;
  std::size_t rungs = 16;
  std::size_t bins = 40;
  unsigned threads = 1;
  std::string disorder_file;

  double tolerance(const std::string& key) const;
};

/// Recognised keys of RunConfig::tolerances and their defaults.
const std::map<std::string, double>& default_tolerances();

/// Parses `<command> [flags]`. A JSON config file given by --config is
/// applied first; flags override it. PSPIN_SEED supplies the default seed.
RunConfig parse_config(const std::vector<std::string>& args);

/// JSON description of every field, used for the reproducibility record.
std::string config_json(const RunConfig& config);

/// Computes the table for a command without writing it.
Table compute(const RunConfig& config);

/// compute + emit; returns 0 on success, 1 on numerical failure, 2 on usage error.
int run(const RunConfig& config);

/// Full entry point: parse, run, map errors to exit codes.
int main(const std::vector<std::string>& args);

}  // namespace pspin::cli

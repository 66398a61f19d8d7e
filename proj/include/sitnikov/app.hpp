#pragma once

// Command implementations behind the `sitnikov` executable. Each command
// writes its artifacts under RunConfig::out_dir and returns an exit code:
// 0 success, 1 numerical failure, 2 input error.

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sitnikov/io.hpp"
#include "sitnikov/primaries.hpp"

namespace sitnikov::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitInput = 2;

struct EnsembleSource {
  std::string builtin;  // circular:N[:D] | kepler:E | nbody:N | nbody-kepler:E
  std::filesystem::path file;
  std::filesystem::path spec;
};

struct Tolerances {
  double integrator = 1e-12;
  double corrector = 1e-10;
  double certification = 1e-8;
  double ode = 1e-6;
  double symmetry = 1e-8;
};

struct RunConfig {
  std::string command;
  EnsembleSource source;
  std::vector<int> ps{1};
  std::vector<int> qs{1};
  Tolerances tol;
  std::optional<double> m_user;
  std::optional<double> epsilon1;
  bool relaxed_symmetry = false;
  std::vector<double> lambdas{0.0, 0.5, 1.0};
  int p_max = -1;  // spectrum; negative selects the default window
  std::size_t rows = 50;         // period-table
  std::size_t intervals = 512;   // nbody output grid
  std::optional<double> zeta;    // verify a given amplitude instead of continuing
  double lambda = 1.0;           // with zeta
  std::filesystem::path out_dir = "out";
  int threads = 1;

  /// Throws Error(kInvalidArgument) on inconsistent settings.
  void validate() const;
  /// Every setting that affects numbers; out_dir and threads are excluded.
  io::Json to_json() const;
  std::string hash() const;
  /// Sorted (p, q) pairs.
  std::vector<std::pair<int, int>> indices() const;
};

/// Reads `{"builtin": ...}` or `{"file": ..., "spec": ...}`; relative paths
/// resolve against the file's directory.
EnsembleSource read_ensemble_file(const std::filesystem::path& path);

std::shared_ptr<const PrimaryEnsemble> load_ensemble(const RunConfig& config);

struct CommandResult {
  int exit_code = kExitOk;
  io::Json report;
  std::vector<std::filesystem::path> files;
};

CommandResult cmd_certify(const RunConfig& config);
CommandResult cmd_bounds(const RunConfig& config);
CommandResult cmd_period_table(const RunConfig& config);
CommandResult cmd_seed(const RunConfig& config);
CommandResult cmd_continue(const RunConfig& config);
CommandResult cmd_spectrum(const RunConfig& config);
CommandResult cmd_verify(const RunConfig& config);
CommandResult cmd_nbody(const RunConfig& config);
CommandResult cmd_pipeline(const RunConfig& config);

/// Dispatches on config.command and maps escaping errors to exit codes,
/// printing diagnostics to stderr.
int run(const RunConfig& config);

}  // namespace sitnikov::app

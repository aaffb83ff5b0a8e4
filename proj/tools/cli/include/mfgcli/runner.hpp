#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include <json.hpp>

#include "mfgcli/config.hpp"

namespace mfg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitSolverError = 3;

inline constexpr int kManifestSchemaVersion = 1;

struct RunOptions {
  std::filesystem::path out_dir = "run";
  /// overrides the task kind declared in the config
  std::optional<TaskKind> task;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::size_t> snapshot_every;
};

struct RunOutcome {
  int exit_code = kExitOk;
  nlohmann::json manifest;
};

/// Executes the task and writes `manifest.json` plus CSV snapshots under
/// `out_dir`. Non-convergence is reported with exit code 0; a SolverError is
/// recorded in the manifest with exit code 3. Configuration problems found
/// at run time (e.g. a stochastic task without a seed) throw ConfigError
/// before anything is written.
///
/// Samplers are seeded from the task seed s: Lipschitz estimates use s,
/// the monotonicity search s + 1, perturbation directions s + 2, multistart
/// guesses s + 3.
RunOutcome run_experiment(const ExperimentConfig& config, const RunOptions& options);

}  // namespace mfg::cli

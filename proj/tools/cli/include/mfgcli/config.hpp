#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "mfg/coupler.hpp"

namespace mfg::cli {

/// Invalid configuration. `line` is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, int line = 0);
  int line() const noexcept { return line_; }

 private:
  int line_;
};

enum class TaskKind { Solve, Multistart, Diagnose, Sweep, Mms };

std::string_view task_name(TaskKind kind) noexcept;
std::optional<TaskKind> parse_task_name(std::string_view name) noexcept;

struct SweepSpec {
  /// dotted path into the config tree, e.g. "time.horizon" or
  /// "populations.0.hamiltonian.sigma"
  std::string parameter;
  std::vector<double> values;
  TaskKind inner = TaskKind::Diagnose;
};

/// Manufactured-solution refinement study for the HJB solver.
struct MmsSpec {
  double horizon = 0.5;
  double viscosity = 1.0;
  std::vector<std::size_t> spatial_cells{10, 20, 40};
  std::size_t spatial_steps = 4000;
  std::size_t temporal_cells = 20;
  std::vector<std::size_t> temporal_steps{50, 100, 200};
  std::size_t reference_steps = 12800;
};

struct TaskSpec {
  TaskKind kind = TaskKind::Solve;
  std::size_t n_starts = 4;
  std::optional<std::uint64_t> seed;
  SweepSpec sweep;
  MmsSpec mms;
};

struct DiagnosticsSpec {
  /// continuous-dependence perturbation sizes; empty disables the probe
  std::vector<double> epsilons{1e-2, 1e-3, 1e-4};
  std::size_t lipschitz_pairs = 200;
  std::size_t monotonicity_pairs = 500;
  std::size_t lattice = 5;
};

/// Constants of the certificate a user may declare; the cost block holds
/// L_F, L_G, C_F, C_G, C'_G and each Hamiltonian its alpha.
struct DeclaredCertificate {
  std::optional<double> C_H;
  std::optional<double> C_bar_H;
  std::optional<double> M;
};

struct ExperimentConfig {
  std::string name;
  /// source text, echoed into the manifest and hashed
  std::string text;
  YAML::Node root;
  std::filesystem::path base_dir;

  /// absent for the mms task, which builds its own problems
  std::optional<MFGProblem> problem;
  std::vector<std::optional<double>> alpha;
  DeclaredCertificate certificate;
  PicardOptions solver;
  TaskSpec task;
  DiagnosticsSpec diagnostics;
  std::size_t snapshot_every = 10;
  std::optional<std::size_t> workers;
};

/// Parses and validates a YAML document. Every error is a ConfigError
/// carrying the line of the offending node.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});

/// `arg` is a config file path or the name of a bundled scenario.
ExperimentConfig load_config(const std::string& arg);

/// A copy of `config` with the numeric value at `dotted_path` replaced,
/// re-validated from the modified tree.
ExperimentConfig with_override(const ExperimentConfig& config, const std::string& dotted_path, double value);

}  // namespace mfg::cli

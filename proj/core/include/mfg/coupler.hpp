#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mfg/cost.hpp"
#include "mfg/field.hpp"
#include "mfg/hamiltonian.hpp"

namespace mfg {

struct MFGProblem {
  Grid grid;
  TimeGrid time;
  std::vector<double> viscosity;
  std::vector<HamiltonianPtr> hamiltonians;
  CostModelPtr cost;
  DensityVector initial;

  std::size_t populations() const noexcept { return hamiltonians.size(); }
  void validate() const;
};

struct PicardOptions {
  double damping = 0.5;  // theta in (0,1]
  double tolerance = 1e-9;
  std::size_t max_iterations = 500;
};

struct MFGSolution {
  PopulationTrajectories values;
  PopulationTrajectories densities;
  bool converged = false;
  std::size_t iterations = 0;
  double residual = 0.0;
};

struct ConvergenceTrace {
  /// sup_t ||m_new(t) - m_old(t)||_{L^2(Omega)^N} per iteration
  std::vector<double> residuals;
  double damping = 0.0;
  double wall_seconds = 0.0;
};

struct PicardResult {
  MFGSolution solution;
  ConvergenceTrace trace;
};

/// sup over time points of the L^2(Omega)^N distance.
double trajectory_distance(const PopulationTrajectories& a, const PopulationTrajectories& b);

/// Damped fixed point m <- (1-theta) m + theta KFP(HJB(m)) until the
/// residual drops to `tolerance` or `max_iterations` is reached. The default
/// start is the constant-in-time extension of m_0. On return the values are
/// recomputed from the returned densities, so v(T) = G(., m(T)) exactly.
/// Non-convergence is reported in the solution, not thrown.
PicardResult picard_solve(const MFGProblem& problem, const PicardOptions& options,
                          std::optional<PopulationTrajectories> init = std::nullopt);

struct MultistartReport {
  std::vector<PicardResult> runs;
  std::size_t converged_runs = 0;
  /// max over converged pairs of sup_t ||m^i(t) - m^j(t)||_2; empty with
  /// fewer than two converged runs.
  std::optional<double> max_pairwise_distance;
  /// D <= 10 tol; empty with fewer than two converged runs.
  std::optional<bool> unique_observed;
};

/// Start 0 is the constant-in-time m_0; the others are time-constant
/// densities from a MeasureSampler seeded with `seed`. Runs are independent
/// and spread over `workers` threads (0 = hardware concurrency).
MultistartReport multistart_probe(const MFGProblem& problem, std::size_t n_starts, const PicardOptions& options,
                                  std::uint64_t seed, std::size_t workers = 1);

/// Constant-in-time initial guesses used by multistart_probe.
std::vector<PopulationTrajectories> multistart_initial_guesses(const MFGProblem& problem, std::size_t n_starts,
                                                               std::uint64_t seed);

}  // namespace mfg

#pragma once

#include <vector>

#include "mfg/field.hpp"
#include "mfg/hamiltonian.hpp"

namespace mfg {

/// Tolerance on the unit mass of an initial density accepted by the solver.
inline constexpr double kInitialMassTolerance = 1e-10;
/// Most negative cell value tolerated after a KFP solve.
inline constexpr double kNegativityTolerance = 1e-12;

/// Drift b_k(t_j, .) = D_pH_k(., Dv_k(t_j, .)) at every time point.
using DriftTrajectory = std::vector<VectorField>;

/// Forward KFP problem for N populations with frozen drifts:
///   dt m_k - nu_k lap m_k - div(b_k m_k) = 0,  zero total flux on the walls.
struct KFPProblem {
  Grid grid;
  TimeGrid time;
  std::vector<double> viscosity;
  std::vector<DriftTrajectory> drift;
  DensityVector initial;

  void validate() const;
};

/// Face flux J = nu (m_R - m_L)/h + b_face m_upwind across every interior
/// face (ordering of `interior_faces`), b_face the mean of the two cell
/// drifts and m_upwind = m_R when b_face > 0, m_L otherwise. Then
/// dt m = div J.
std::vector<double> kfp_face_flux(const Field& m, const VectorField& drift, double viscosity);

/// Implicit Euler in flux form, one sparse solve per step with the drift
/// taken at the new time level. Mass is conserved by the column sums of the
/// assembled M-matrix; the result is nonnegative.
Trajectory march_kfp(const Grid& grid, const TimeGrid& time, double viscosity, const DriftTrajectory& drift,
                     const Field& initial);

PopulationTrajectories solve_kfp_forward(const KFPProblem& problem);

/// D_pH(x, Dv(t_j, x)) for every time point.
DriftTrajectory drift_from_values(const Trajectory& v, const Hamiltonian& h);

struct InitialReport {
  std::vector<double> mass;
  double min_value = 0.0;
  bool in_pn = false;  // within kInitialMassTolerance and nonnegative
  /// max over wall faces of |d_n m_0 + m_0 b.n| per population, using
  /// second-order one-sided reconstructions at the wall.
  std::vector<double> compatibility_residual;
  double max_compatibility_residual() const;
};

/// Checks m_0 against P_N and reports the wall compatibility residual
/// (informational). Rejects negative cells or a mass off by more than 1e-6.
/// An empty `drift_at_0` means zero drift.
InitialReport validate_initial(const DensityVector& initial, const std::vector<VectorField>& drift_at_0,
                               const Grid& grid);

}  // namespace mfg

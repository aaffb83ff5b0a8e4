#pragma once

#include <vector>

#include "mfg/cost.hpp"
#include "mfg/field.hpp"
#include "mfg/hamiltonian.hpp"

namespace mfg {

/// Backward HJB problem for N populations with the density trajectory frozen:
///   -dt v_k - nu_k lap v_k + H_k(x, Dv_k) = F_k(x, m(t)),  d_n v_k = 0,
///   v_k(T) = G_k(x, m(T)).
struct HJBProblem {
  Grid grid;
  TimeGrid time;
  std::vector<double> viscosity;
  std::vector<HamiltonianPtr> hamiltonians;
  CostModelPtr cost;
  PopulationTrajectories density;

  void validate() const;
};

/// Semi-implicit backward march for one population. Stepping from t_{j+1}
/// to t_j solves
///   (I + dt nu L_N) v^j = v^{j+1} + dt (F^{j+1} - H(., D v^{j+1}))
/// with L_N the Neumann -laplacian. If dt exceeds h / max|D_pH| the step is
/// split into equal sub-steps that satisfy the bound.
/// `forcing` holds F at every time point (frame 0 is unused by the march).
Trajectory march_hjb(const Grid& grid, const TimeGrid& time, double viscosity, const Hamiltonian& h,
                     const std::vector<Field>& forcing, const Field& terminal);

PopulationTrajectories solve_hjb_backward(const HJBProblem& problem);

/// F_k(., m(t_j)) for every population and time point.
std::vector<std::vector<Field>> running_cost_frames(const CostModel& cost, const PopulationTrajectories& m);

/// Pointwise residual -(v^{j+1}-v^{j-1})/(2dt) - nu lap v^j + H(x,Dv^j) - F^j
/// at interior cells and interior time points; zero elsewhere.
Trajectory hjb_residual(const Trajectory& v, double viscosity, const Hamiltonian& h,
                        const std::vector<Field>& forcing);

PopulationTrajectories hjb_residual(const PopulationTrajectories& v, const HJBProblem& problem);

}  // namespace mfg

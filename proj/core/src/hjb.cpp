#include "mfg/hjb.hpp"

#include <cmath>
#include <map>
#include <string>

#include "mfg/error.hpp"
#include "mfg/linear_solver.hpp"
#include "mfg/operators.hpp"

namespace mfg {

namespace {

constexpr std::size_t kMaxSubsteps = 1'000'000;

void check_frames(const std::vector<Field>& frames, const Grid& grid, const TimeGrid& time, const char* what) {
  if (frames.size() != time.points()) {
    throw InvalidInput(std::string("hjb: ") + what + " needs one frame per time point");
  }
  for (const auto& f : frames) {
    if (!(f.grid() == grid)) throw InvalidInput(std::string("hjb: ") + what + " grid mismatch");
  }
}

}  // namespace

void HJBProblem::validate() const {
  const std::size_t n = hamiltonians.size();
  if (n == 0) throw InvalidInput("hjb: at least one population required");
  if (viscosity.size() != n) throw InvalidInput("hjb: one viscosity per population required");
  for (double nu : viscosity) {
    if (!(nu > 0.0) || !std::isfinite(nu)) throw InvalidInput("hjb: viscosities must be > 0");
  }
  for (const auto& h : hamiltonians) {
    if (!h) throw InvalidInput("hjb: missing Hamiltonian");
  }
  if (!cost || cost->populations() != n) throw InvalidInput("hjb: cost model population count mismatch");
  if (density.size() != n) throw InvalidInput("hjb: one density trajectory per population required");
  for (const auto& traj : density) {
    if (!(traj.time() == time) || !(traj.grid() == grid)) {
      throw InvalidInput("hjb: density trajectory does not live on the problem grids");
    }
  }
}

Trajectory march_hjb(const Grid& grid, const TimeGrid& time, double viscosity, const Hamiltonian& h,
                     const std::vector<Field>& forcing, const Field& terminal) {
  if (!(viscosity > 0.0)) throw InvalidInput("hjb: viscosity must be > 0");
  check_frames(forcing, grid, time, "forcing");
  if (!(terminal.grid() == grid)) throw InvalidInput("hjb: terminal grid mismatch");

  const std::size_t nt = time.steps();
  const double dt = time.dt();
  const double hmin = grid.min_spacing();
  const SparseMatrix lap = neumann_laplacian_matrix(grid);
  SparseMatrix eye(lap.rows(), lap.cols());
  eye.setIdentity();

  std::map<std::size_t, LinearSolver> solvers;
  auto solver_for = [&](std::size_t substeps) -> const LinearSolver& {
    auto it = solvers.find(substeps);
    if (it == solvers.end()) {
      const double sub_dt = dt / static_cast<double>(substeps);
      SparseMatrix a = eye + (sub_dt * viscosity) * lap;
      it = solvers.emplace(substeps, LinearSolver(std::move(a), LinearSolver::Kind::SymmetricPositiveDefinite)).first;
    }
    return it->second;
  };

  std::vector<Field> frames(time.points(), Field(grid));
  frames[nt] = terminal;
  Field cur = terminal;
  Field rhs(grid);
  std::vector<double> ham(grid.size());

  for (std::size_t jj = nt; jj-- > 0;) {
    const Field& f = forcing[jj + 1];
    VectorField grad = gradient(cur);

    double max_dp = 0.0;
    for (std::size_t c = 0; c < grid.size(); ++c) {
      const Vec2 x = grid.center(c);
      ham[c] = h.value(x, grad[c]);
      max_dp = std::max(max_dp, norm(h.dp(x, grad[c])));
    }
    if (!std::isfinite(max_dp)) throw SolverError("hjb: non-finite D_pH", jj);
    const double need = std::ceil(dt * max_dp / hmin);
    if (need > static_cast<double>(kMaxSubsteps)) throw SolverError("hjb: sub-stepping limit exceeded", jj);
    const std::size_t substeps = std::max<std::size_t>(1, static_cast<std::size_t>(need));
    const double sub_dt = dt / static_cast<double>(substeps);
    const LinearSolver& solver = solver_for(substeps);

    for (std::size_t s = 0; s < substeps; ++s) {
      if (s > 0) {
        grad = gradient(cur);
        for (std::size_t c = 0; c < grid.size(); ++c) ham[c] = h.value(grid.center(c), grad[c]);
      }
      for (std::size_t c = 0; c < grid.size(); ++c) {
        if (!std::isfinite(ham[c])) throw SolverError("hjb: non-finite Hamiltonian value", jj);
        rhs[c] = cur[c] + sub_dt * (f[c] - ham[c]);
      }
      try {
        solver.solve(rhs.values(), cur.values());
      } catch (const SolverError& e) {
        throw SolverError(std::string("hjb: ") + e.what(), jj);
      }
    }
    frames[jj] = cur;
  }
  return Trajectory(time, std::move(frames));
}

std::vector<std::vector<Field>> running_cost_frames(const CostModel& cost, const PopulationTrajectories& m) {
  const std::size_t n = m.size();
  const std::size_t points = m.front().size();
  std::vector<std::vector<Field>> out(n);
  for (auto& v : out) v.reserve(points);
  for (std::size_t j = 0; j < points; ++j) {
    auto f = cost.running(density_at(m, j));
    for (std::size_t k = 0; k < n; ++k) out[k].push_back(std::move(f[k]));
  }
  return out;
}

PopulationTrajectories solve_hjb_backward(const HJBProblem& problem) {
  problem.validate();
  const auto forcing = running_cost_frames(*problem.cost, problem.density);
  const auto terminal = problem.cost->terminal(density_at(problem.density, problem.time.steps()));
  PopulationTrajectories out;
  out.reserve(problem.hamiltonians.size());
  for (std::size_t k = 0; k < problem.hamiltonians.size(); ++k) {
    out.push_back(march_hjb(problem.grid, problem.time, problem.viscosity[k], *problem.hamiltonians[k],
                            forcing[k], terminal[k]));
  }
  return out;
}

Trajectory hjb_residual(const Trajectory& v, double viscosity, const Hamiltonian& h,
                        const std::vector<Field>& forcing) {
  const Grid& grid = v.grid();
  const TimeGrid& time = v.time();
  check_frames(forcing, grid, time, "forcing");
  const double dt = time.dt();
  std::vector<Field> out(time.points(), Field(grid));
  for (std::size_t j = 1; j + 1 < time.points(); ++j) {
    const Field lap = laplacian(v[j]);
    const VectorField grad = gradient(v[j]);
    for (std::size_t c = 0; c < grid.size(); ++c) {
      if (grid.on_boundary(c)) continue;
      const double dvdt = (v[j + 1][c] - v[j - 1][c]) / (2.0 * dt);
      out[j][c] = -dvdt - viscosity * lap[c] + h.value(grid.center(c), grad[c]) - forcing[j][c];
    }
  }
  return Trajectory(time, std::move(out));
}

PopulationTrajectories hjb_residual(const PopulationTrajectories& v, const HJBProblem& problem) {
  problem.validate();
  if (v.size() != problem.hamiltonians.size()) throw InvalidInput("hjb_residual: population count mismatch");
  const auto forcing = running_cost_frames(*problem.cost, problem.density);
  PopulationTrajectories out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    out.push_back(hjb_residual(v[k], problem.viscosity[k], *problem.hamiltonians[k], forcing[k]));
  }
  return out;
}

}  // namespace mfg

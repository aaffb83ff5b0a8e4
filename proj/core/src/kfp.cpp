#include "mfg/kfp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfg/error.hpp"
#include "mfg/linear_solver.hpp"
#include "mfg/operators.hpp"

namespace mfg {

void KFPProblem::validate() const {
  const std::size_t n = initial.populations();
  if (n == 0) throw InvalidInput("kfp: at least one population required");
  if (viscosity.size() != n || drift.size() != n) {
    throw InvalidInput("kfp: one viscosity and one drift trajectory per population required");
  }
  for (double nu : viscosity) {
    if (!(nu > 0.0) || !std::isfinite(nu)) throw InvalidInput("kfp: viscosities must be > 0");
  }
  if (!(initial.grid() == grid)) throw InvalidInput("kfp: initial density grid mismatch");
  check_density_vector(initial, kInitialMassTolerance);
  for (const auto& d : drift) {
    if (d.size() != time.points()) throw InvalidInput("kfp: drift needs one frame per time point");
    for (const auto& frame : d) {
      if (!(frame.grid() == grid)) throw InvalidInput("kfp: drift grid mismatch");
      if (!frame.all_finite()) throw InvalidInput("kfp: drift has non-finite values");
    }
  }
}

namespace {

struct FaceCoefficients {
  double right;  // coefficient of m_R in J
  double left;   // coefficient of m_L in J
};

FaceCoefficients face_coefficients(const Grid& grid, const Face& face, const VectorField& drift, double nu) {
  const double h = grid.spacing(face.axis);
  const double b = 0.5 * (drift[face.left][face.axis] + drift[face.right][face.axis]);
  return {nu / h + std::max(b, 0.0), -nu / h + std::min(b, 0.0)};
}

}  // namespace

std::vector<double> kfp_face_flux(const Field& m, const VectorField& drift, double viscosity) {
  const Grid& grid = m.grid();
  const auto faces = interior_faces(grid);
  std::vector<double> flux(faces.size());
  for (std::size_t i = 0; i < faces.size(); ++i) {
    const auto c = face_coefficients(grid, faces[i], drift, viscosity);
    flux[i] = c.right * m[faces[i].right] + c.left * m[faces[i].left];
  }
  return flux;
}

Trajectory march_kfp(const Grid& grid, const TimeGrid& time, double viscosity, const DriftTrajectory& drift,
                     const Field& initial) {
  if (!(viscosity > 0.0)) throw InvalidInput("kfp: viscosity must be > 0");
  if (drift.size() != time.points()) throw InvalidInput("kfp: drift needs one frame per time point");
  if (!(initial.grid() == grid)) throw InvalidInput("kfp: initial density grid mismatch");

  const auto faces = interior_faces(grid);
  const double dt = time.dt();
  const auto n = static_cast<Eigen::Index>(grid.size());

  std::vector<Field> frames;
  frames.reserve(time.points());
  frames.push_back(initial);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(grid.size() + 4 * faces.size());

  for (std::size_t j = 0; j < time.steps(); ++j) {
    const VectorField& b = drift[j + 1];
    trip.clear();
    for (std::size_t c = 0; c < grid.size(); ++c) trip.emplace_back(c, c, 1.0);
    for (const Face& face : faces) {
      const auto coef = face_coefficients(grid, face, b, viscosity);
      const double w = dt / grid.spacing(face.axis);
      trip.emplace_back(face.left, face.right, -w * coef.right);
      trip.emplace_back(face.left, face.left, -w * coef.left);
      trip.emplace_back(face.right, face.right, w * coef.right);
      trip.emplace_back(face.right, face.left, w * coef.left);
    }
    SparseMatrix a(n, n);
    a.setFromTriplets(trip.begin(), trip.end());

    Field next(grid);
    try {
      LinearSolver solver(std::move(a), LinearSolver::Kind::General);
      solver.solve(frames.back().values(), next.values());
    } catch (const SolverError& e) {
      throw SolverError(std::string("kfp: ") + e.what(), j + 1);
    }
    if (next.min() < -kNegativityTolerance) {
      throw SolverError("kfp: negative density " + std::to_string(next.min()) + " after solve", j + 1);
    }
    frames.push_back(std::move(next));
  }
  return Trajectory(time, std::move(frames));
}

PopulationTrajectories solve_kfp_forward(const KFPProblem& problem) {
  problem.validate();
  PopulationTrajectories out;
  out.reserve(problem.initial.populations());
  for (std::size_t k = 0; k < problem.initial.populations(); ++k) {
    out.push_back(march_kfp(problem.grid, problem.time, problem.viscosity[k], problem.drift[k], problem.initial[k]));
  }
  return out;
}

DriftTrajectory drift_from_values(const Trajectory& v, const Hamiltonian& h) {
  const Grid& grid = v.grid();
  DriftTrajectory out;
  out.reserve(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    const VectorField grad = gradient(v[j]);
    VectorField b(grid);
    for (std::size_t c = 0; c < grid.size(); ++c) b[c] = h.dp(grid.center(c), grad[c]);
    if (!b.all_finite()) throw SolverError("drift: non-finite D_pH", j);
    out.push_back(std::move(b));
  }
  return out;
}

double InitialReport::max_compatibility_residual() const {
  double m = 0.0;
  for (double r : compatibility_residual) m = std::max(m, r);
  return m;
}

InitialReport validate_initial(const DensityVector& initial, const std::vector<VectorField>& drift_at_0,
                               const Grid& grid) {
  if (initial.populations() == 0 || !(initial.grid() == grid)) {
    throw InvalidInput("validate_initial: densities missing or on a different grid");
  }
  if (!drift_at_0.empty() && drift_at_0.size() != initial.populations()) {
    throw InvalidInput("validate_initial: one drift per population required");
  }
  InitialReport rep;
  rep.min_value = initial[0].min();
  for (std::size_t k = 0; k < initial.populations(); ++k) {
    rep.mass.push_back(integrate(initial[k]));
    rep.min_value = std::min(rep.min_value, initial[k].min());
  }
  if (rep.min_value < 0.0) {
    throw InvalidInput("initial density has negative cells (min " + std::to_string(rep.min_value) + ")");
  }
  rep.in_pn = true;
  for (std::size_t k = 0; k < rep.mass.size(); ++k) {
    const double defect = std::abs(rep.mass[k] - 1.0);
    if (defect > 1e-6) {
      throw InvalidInput("initial density " + std::to_string(k + 1) + " has mass " + std::to_string(rep.mass[k]));
    }
    if (defect > kInitialMassTolerance) rep.in_pn = false;
  }

  for (std::size_t k = 0; k < initial.populations(); ++k) {
    const Field& m = initial[k];
    double worst = 0.0;
    for (int axis = 0; axis < grid.dim(); ++axis) {
      const std::size_t na = grid.cells(axis);
      const std::size_t nother = grid.dim() == 2 ? grid.cells(1 - axis) : 1;
      const double h = grid.spacing(axis);
      for (std::size_t line = 0; line < nother; ++line) {
        for (int side = 0; side < 2; ++side) {
          std::array<std::size_t, 3> cells{};
          for (std::size_t s = 0; s < 3; ++s) {
            const std::size_t along = side == 0 ? s : na - 1 - s;
            cells[s] = axis == 0 ? grid.flat(along, line) : grid.flat(line, along);
          }
          const double f0 = m[cells[0]], f1 = m[cells[1]], f2 = m[cells[2]];
          const double dn = (2.0 * f0 - 3.0 * f1 + f2) / h;
          const double m_wall = (15.0 * f0 - 10.0 * f1 + 3.0 * f2) / 8.0;
          double bn = 0.0;
          if (!drift_at_0.empty()) {
            const VectorField& b = drift_at_0[k];
            const double bw = (15.0 * b[cells[0]][axis] - 10.0 * b[cells[1]][axis] + 3.0 * b[cells[2]][axis]) / 8.0;
            bn = side == 0 ? -bw : bw;
          }
          worst = std::max(worst, std::abs(dn + m_wall * bn));
        }
      }
    }
    rep.compatibility_residual.push_back(worst);
  }
  return rep;
}

}  // namespace mfg

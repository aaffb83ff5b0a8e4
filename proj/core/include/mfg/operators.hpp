#pragma once

#include <span>

#include <Eigen/SparseCore>

#include "mfg/field.hpp"

namespace mfg {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Central differences; at wall cells the ghost value mirrors the wall cell,
/// so the one-sided difference is (f[i+1] - f[i]) / (2h) and a constant
/// field has exactly zero gradient everywhere.
VectorField gradient(const Field& f);

/// Five-point (three-point in 1D) Laplacian with the same mirror ghosts,
/// i.e. zero normal derivative on every wall.
Field laplacian(const Field& f);

/// The positive semidefinite matrix of -laplacian on `grid`.
SparseMatrix neumann_laplacian_matrix(const Grid& grid);

/// Midpoint rule: sum of f(x_j) times the cell volume.
double integrate(const Field& f);

double l2_norm(const Field& f);
double linf_norm(const Field& f);

/// Discrete divergence of a face flux. `face_flux[i]` is the flux across
/// `interior_faces(grid)[i]` in the +axis direction; wall faces carry zero
/// flux, so `integrate(flux_divergence(...))` vanishes up to round-off.
Field flux_divergence(const Grid& grid, std::span<const double> face_flux);

}  // namespace mfg

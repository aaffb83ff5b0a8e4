#include "mfg/operators.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mfg/error.hpp"

namespace mfg {

VectorField gradient(const Field& f) {
  const Grid& g = f.grid();
  VectorField out(g);
  for (std::size_t c = 0; c < g.size(); ++c) {
    Vec2 d{0.0, 0.0};
    for (int axis = 0; axis < g.dim(); ++axis) {
      const double up = f[g.reflect_neighbor(c, axis, +1)];
      const double down = f[g.reflect_neighbor(c, axis, -1)];
      d[axis] = (up - down) / (2.0 * g.spacing(axis));
    }
    out[c] = d;
  }
  return out;
}

Field laplacian(const Field& f) {
  const Grid& g = f.grid();
  Field out(g);
  for (std::size_t c = 0; c < g.size(); ++c) {
    double acc = 0.0;
    for (int axis = 0; axis < g.dim(); ++axis) {
      const double h = g.spacing(axis);
      const double up = f[g.reflect_neighbor(c, axis, +1)];
      const double down = f[g.reflect_neighbor(c, axis, -1)];
      acc += ((up - f[c]) - (f[c] - down)) / (h * h);
    }
    out[c] = acc;
  }
  return out;
}

SparseMatrix neumann_laplacian_matrix(const Grid& grid) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(grid.size() * 5);
  for (const Face& face : interior_faces(grid)) {
    const double h = grid.spacing(face.axis);
    const double w = 1.0 / (h * h);
    trip.emplace_back(face.left, face.left, w);
    trip.emplace_back(face.right, face.right, w);
    trip.emplace_back(face.left, face.right, -w);
    trip.emplace_back(face.right, face.left, -w);
  }
  SparseMatrix a(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(grid.size()));
  a.setFromTriplets(trip.begin(), trip.end());
  a.makeCompressed();
  return a;
}

double integrate(const Field& f) {
  double sum = 0.0;
  for (double v : f.values()) sum += v;
  return sum * f.grid().cell_volume();
}

double l2_norm(const Field& f) {
  double sum = 0.0;
  for (double v : f.values()) sum += v * v;
  return std::sqrt(sum * f.grid().cell_volume());
}

double linf_norm(const Field& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

Field flux_divergence(const Grid& grid, std::span<const double> face_flux) {
  const auto faces = interior_faces(grid);
  if (face_flux.size() != faces.size()) {
    throw InvalidInput("flux_divergence: expected one flux value per interior face");
  }
  Field out(grid);
  for (std::size_t i = 0; i < faces.size(); ++i) {
    const double q = face_flux[i] / grid.spacing(faces[i].axis);
    out[faces[i].left] += q;
    out[faces[i].right] -= q;
  }
  return out;
}

}  // namespace mfg

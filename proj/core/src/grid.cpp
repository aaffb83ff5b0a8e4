#include "mfg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfg/error.hpp"

namespace mfg {

double norm(const Vec2& v) noexcept { return std::hypot(v[0], v[1]); }

double dot(const Vec2& a, const Vec2& b) noexcept { return a[0] * b[0] + a[1] * b[1]; }

namespace {

void check_axis(Interval iv, std::size_t n, const char* name) {
  if (!(std::isfinite(iv.lo) && std::isfinite(iv.hi)) || !(iv.hi > iv.lo)) {
    throw InvalidInput(std::string("grid: axis ") + name + " needs a finite interval with hi > lo");
  }
  if (n < Grid::kMinCells) {
    throw InvalidInput(std::string("grid: axis ") + name + " needs at least 3 cells, got " +
                       std::to_string(n));
  }
}

}  // namespace

Grid::Grid(Interval x, std::size_t nx) : dim_(1), n_{nx, 1}, extent_{x, Interval{0.0, 1.0}} {
  check_axis(x, nx, "x");
  h_ = {x.length() / static_cast<double>(nx), 1.0};
}

Grid::Grid(Interval x, std::size_t nx, Interval y, std::size_t ny)
    : dim_(2), n_{nx, ny}, extent_{x, y} {
  check_axis(x, nx, "x");
  check_axis(y, ny, "y");
  h_ = {x.length() / static_cast<double>(nx), y.length() / static_cast<double>(ny)};
}

double Grid::min_spacing() const noexcept {
  return dim_ == 1 ? h_[0] : std::min(h_[0], h_[1]);
}

double Grid::max_spacing() const noexcept {
  return dim_ == 1 ? h_[0] : std::max(h_[0], h_[1]);
}

double Grid::measure() const noexcept {
  return dim_ == 1 ? extent_[0].length() : extent_[0].length() * extent_[1].length();
}

Vec2 Grid::center(std::size_t flat) const noexcept {
  const auto [i, j] = index(flat);
  Vec2 c{extent_[0].lo + (static_cast<double>(i) + 0.5) * h_[0], 0.0};
  if (dim_ == 2) c[1] = extent_[1].lo + (static_cast<double>(j) + 0.5) * h_[1];
  return c;
}

std::size_t Grid::reflect_neighbor(std::size_t flat, int axis, int dir) const noexcept {
  auto idx = index(flat);
  const std::size_t k = idx[axis];
  if (dir < 0) {
    if (k == 0) return flat;
    --idx[axis];
  } else {
    if (k + 1 == n_[axis]) return flat;
    ++idx[axis];
  }
  return this->flat(idx[0], idx[1]);
}

bool Grid::on_boundary(std::size_t flat) const noexcept {
  const auto [i, j] = index(flat);
  if (i == 0 || i + 1 == n_[0]) return true;
  return dim_ == 2 && (j == 0 || j + 1 == n_[1]);
}

std::vector<Face> interior_faces(const Grid& grid) {
  std::vector<Face> faces;
  const std::size_t nx = grid.cells(0);
  const std::size_t ny = grid.cells(1);
  faces.reserve((nx - 1) * ny + (grid.dim() == 2 ? nx * (ny - 1) : 0));
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      faces.push_back({0, grid.flat(i, j), grid.flat(i + 1, j)});
    }
  }
  if (grid.dim() == 2) {
    for (std::size_t j = 0; j + 1 < ny; ++j) {
      for (std::size_t i = 0; i < nx; ++i) {
        faces.push_back({1, grid.flat(i, j), grid.flat(i, j + 1)});
      }
    }
  }
  return faces;
}

TimeGrid::TimeGrid(double horizon, std::size_t steps) : horizon_(horizon), steps_(steps) {
  if (!(std::isfinite(horizon) && horizon > 0.0)) {
    throw InvalidInput("time grid: horizon T must be finite and > 0");
  }
  if (steps < 1) throw InvalidInput("time grid: at least one time step is required");
}

double TimeGrid::time(std::size_t j) const noexcept {
  if (j >= steps_) return horizon_;
  return static_cast<double>(j) * dt();
}

}  // namespace mfg

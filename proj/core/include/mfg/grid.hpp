#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace mfg {

/// Points and momenta. In one dimension the second component is always zero.
using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

double norm(const Vec2& v) noexcept;
double dot(const Vec2& a, const Vec2& b) noexcept;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double length() const noexcept { return hi - lo; }
  bool operator==(const Interval&) const = default;
};

/// Uniform cell-centered grid on a box in one or two dimensions.
/// Cells are numbered with the x index running fastest.
class Grid {
 public:
  static constexpr std::size_t kMinCells = 3;

  Grid(Interval x, std::size_t nx);
  Grid(Interval x, std::size_t nx, Interval y, std::size_t ny);

  int dim() const noexcept { return dim_; }
  std::size_t cells(int axis) const noexcept { return n_[axis]; }
  Interval extent(int axis) const noexcept { return extent_[axis]; }
  double spacing(int axis) const noexcept { return h_[axis]; }
  double min_spacing() const noexcept;
  double max_spacing() const noexcept;

  std::size_t size() const noexcept { return n_[0] * n_[1]; }
  double cell_volume() const noexcept { return h_[0] * h_[1]; }
  double measure() const noexcept;

  std::size_t flat(std::size_t i, std::size_t j = 0) const noexcept { return i + n_[0] * j; }
  std::array<std::size_t, 2> index(std::size_t flat) const noexcept {
    return {flat % n_[0], flat / n_[0]};
  }
  Vec2 center(std::size_t flat) const noexcept;

  /// Neighbour along `axis` in direction `dir` (+1 or -1). Off the box the
  /// cell itself is returned, which is the mirror ghost of a zero-slope wall.
  std::size_t reflect_neighbor(std::size_t flat, int axis, int dir) const noexcept;
  bool on_boundary(std::size_t flat) const noexcept;

  bool operator==(const Grid&) const = default;

 private:
  int dim_;
  std::array<std::size_t, 2> n_;
  std::array<Interval, 2> extent_;
  std::array<double, 2> h_;
};

/// An interior face between two adjacent cells, `left` having the smaller
/// coordinate along `axis`.
struct Face {
  int axis;
  std::size_t left;
  std::size_t right;
};

std::vector<Face> interior_faces(const Grid& grid);

class TimeGrid {
 public:
  TimeGrid(double horizon, std::size_t steps);

  double horizon() const noexcept { return horizon_; }
  std::size_t steps() const noexcept { return steps_; }
  std::size_t points() const noexcept { return steps_ + 1; }
  double dt() const noexcept { return horizon_ / static_cast<double>(steps_); }
  double time(std::size_t j) const noexcept;

  bool operator==(const TimeGrid&) const = default;

 private:
  double horizon_;
  std::size_t steps_;
};

}  // namespace mfg

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "mfg/grid.hpp"

namespace mfg {

/// One scalar value per cell center.
class Field {
 public:
  explicit Field(Grid grid, double fill = 0.0);
  Field(Grid grid, std::vector<double> values);

  static Field from_function(const Grid& grid, const std::function<double(const Vec2&)>& f);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  bool all_finite() const noexcept;
  double min() const noexcept;
  double max() const noexcept;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s) noexcept;

  bool operator==(const Field&) const = default;

 private:
  Grid grid_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

/// One Vec2 per cell center (gradients, drifts).
class VectorField {
 public:
  explicit VectorField(Grid grid, Vec2 fill = {0.0, 0.0});

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  const Vec2& operator[](std::size_t i) const noexcept { return values_[i]; }
  Vec2& operator[](std::size_t i) noexcept { return values_[i]; }
  std::span<const Vec2> values() const noexcept { return values_; }

  bool all_finite() const noexcept;
  /// max over cells of the Euclidean norm
  double max_norm() const noexcept;
  Field component(int axis) const;

  bool operator==(const VectorField&) const = default;

 private:
  Grid grid_;
  std::vector<Vec2> values_;
};

/// Fields at every point of a time grid.
class Trajectory {
 public:
  Trajectory(TimeGrid time, std::vector<Field> frames);
  static Trajectory constant(TimeGrid time, const Field& f);

  const TimeGrid& time() const noexcept { return time_; }
  const Grid& grid() const noexcept { return frames_.front().grid(); }
  std::size_t size() const noexcept { return frames_.size(); }
  const Field& operator[](std::size_t j) const noexcept { return frames_[j]; }
  Field& operator[](std::size_t j) noexcept { return frames_[j]; }
  const std::vector<Field>& frames() const noexcept { return frames_; }

  double max_abs() const noexcept;

  bool operator==(const Trajectory&) const = default;

 private:
  TimeGrid time_;
  std::vector<Field> frames_;
};

/// N densities m_1..m_N on a common grid. Membership in P_N is checked by
/// `check_density_vector`, not enforced on every mutation.
class DensityVector {
 public:
  DensityVector() = default;
  explicit DensityVector(std::vector<Field> components);

  std::size_t populations() const noexcept { return components_.size(); }
  const Grid& grid() const { return components_.front().grid(); }
  const Field& operator[](std::size_t k) const noexcept { return components_[k]; }
  Field& operator[](std::size_t k) noexcept { return components_[k]; }
  auto begin() const noexcept { return components_.begin(); }
  auto end() const noexcept { return components_.end(); }

  bool operator==(const DensityVector&) const = default;

 private:
  std::vector<Field> components_;
};

/// Per-population value or density trajectories.
using PopulationTrajectories = std::vector<Trajectory>;

DensityVector density_at(const PopulationTrajectories& m, std::size_t j);

/// Throws InvalidInput unless every component is >= 0 cellwise and has unit
/// mass within `mass_tol`.
void check_density_vector(const DensityVector& m, double mass_tol);

/// Clips at zero and rescales to unit mass.
Field project_to_density(Field f);

}  // namespace mfg

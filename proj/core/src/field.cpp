#include "mfg/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfg/error.hpp"
#include "mfg/operators.hpp"

namespace mfg {

Field::Field(Grid grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

Field::Field(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw InvalidInput("field: value count " + std::to_string(values_.size()) +
                       " does not match grid size " + std::to_string(grid_.size()));
  }
}

Field Field::from_function(const Grid& grid, const std::function<double(const Vec2&)>& f) {
  Field out(grid);
  for (std::size_t c = 0; c < grid.size(); ++c) out[c] = f(grid.center(c));
  return out;
}

bool Field::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double Field::min() const noexcept { return *std::min_element(values_.begin(), values_.end()); }
double Field::max() const noexcept { return *std::max_element(values_.begin(), values_.end()); }

Field& Field::operator+=(const Field& other) {
  if (!(other.grid_ == grid_)) throw InvalidInput("field: grid mismatch in +=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  if (!(other.grid_ == grid_)) throw InvalidInput("field: grid mismatch in -=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(double s) noexcept {
  for (double& v : values_) v *= s;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

VectorField::VectorField(Grid grid, Vec2 fill) : grid_(grid), values_(grid.size(), fill) {}

bool VectorField::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(),
                     [](const Vec2& v) { return std::isfinite(v[0]) && std::isfinite(v[1]); });
}

double VectorField::max_norm() const noexcept {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, norm(v));
  return m;
}

Field VectorField::component(int axis) const {
  Field out(grid_);
  for (std::size_t c = 0; c < values_.size(); ++c) out[c] = values_[c][axis];
  return out;
}

Trajectory::Trajectory(TimeGrid time, std::vector<Field> frames)
    : time_(time), frames_(std::move(frames)) {
  if (frames_.size() != time_.points()) {
    throw InvalidInput("trajectory: expected " + std::to_string(time_.points()) + " frames, got " +
                       std::to_string(frames_.size()));
  }
  for (const auto& f : frames_) {
    if (!(f.grid() == frames_.front().grid())) {
      throw InvalidInput("trajectory: frames live on different grids");
    }
  }
}

Trajectory Trajectory::constant(TimeGrid time, const Field& f) {
  return Trajectory(time, std::vector<Field>(time.points(), f));
}

double Trajectory::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& f : frames_) m = std::max(m, linf_norm(f));
  return m;
}

DensityVector::DensityVector(std::vector<Field> components) : components_(std::move(components)) {
  if (components_.empty()) throw InvalidInput("density vector: at least one population required");
  for (const auto& f : components_) {
    if (!(f.grid() == components_.front().grid())) {
      throw InvalidInput("density vector: components live on different grids");
    }
  }
}

DensityVector density_at(const PopulationTrajectories& m, std::size_t j) {
  std::vector<Field> comps;
  comps.reserve(m.size());
  for (const auto& traj : m) comps.push_back(traj[j]);
  return DensityVector(std::move(comps));
}

void check_density_vector(const DensityVector& m, double mass_tol) {
  for (std::size_t k = 0; k < m.populations(); ++k) {
    const Field& f = m[k];
    if (!f.all_finite()) {
      throw InvalidInput("density " + std::to_string(k + 1) + " has non-finite values");
    }
    if (f.min() < 0.0) {
      throw InvalidInput("density " + std::to_string(k + 1) + " has negative cells (min " +
                         std::to_string(f.min()) + ")");
    }
    const double mass = integrate(f);
    if (std::abs(mass - 1.0) > mass_tol) {
      throw InvalidInput("density " + std::to_string(k + 1) + " has mass " +
                         std::to_string(mass) + ", expected 1");
    }
  }
}

Field project_to_density(Field f) {
  for (double& v : f.values()) v = std::max(v, 0.0);
  const double mass = integrate(f);
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw InvalidInput("project_to_density: field has no positive mass");
  }
  f *= 1.0 / mass;
  return f;
}

}  // namespace mfg

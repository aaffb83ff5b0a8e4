#pragma once

// Shared builders for the unit and acceptance tests.

#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <vector>

#include "mfg/coupler.hpp"
#include "mfg/operators.hpp"

namespace fixtures {

inline constexpr double pi = std::numbers::pi;

inline mfg::Grid unit_grid(std::size_t n) { return mfg::Grid({0.0, 1.0}, n); }

// |p|^2 / 2
inline mfg::HamiltonianPtr quadratic() {
  return mfg::make_power_hamiltonian(mfg::constant_fn(0.5), 0.0, 2.0, {1.21, 1.0});
}

// (1 + |p|^2) / 2
inline mfg::HamiltonianPtr shifted_quadratic() {
  return mfg::make_power_hamiltonian(mfg::constant_fn(0.5), 1.0, 2.0, {1.21, 1.0});
}

inline mfg::HamiltonianPtr zero_hamiltonian() {
  return mfg::make_robust_hamiltonian(mfg::constant_vector_fn({0.0, 0.0}), mfg::constant_fn(0.0),
                                      mfg::constant_fn(0.0), 1.0, {0.0, 0.0});
}

inline mfg::Field cosine_density(const mfg::Grid& g, double amplitude) {
  return mfg::project_to_density(
      mfg::Field::from_function(g, [&](const mfg::Vec2& x) { return 1.0 + amplitude * std::cos(pi * x[0]); }));
}

inline mfg::Field uniform_density(const mfg::Grid& g) { return mfg::project_to_density(mfg::Field(g, 1.0)); }

inline mfg::FunctionalPtr schelling_cost(const mfg::Grid& g, double threshold = 0.4, double epsilon = 0.05) {
  mfg::SchellingParams p;
  p.windows = {mfg::window_kernel(0.1, 0.05), mfg::window_kernel(0.1, 0.05)};
  p.thresholds = {threshold, threshold};
  p.epsilon = epsilon;
  return mfg::make_schelling_cost(g, 2, p);
}

// The schelling_smallT scenario built directly against the core API.
inline mfg::MFGProblem schelling_problem(double horizon = 0.05, std::size_t n = 100, std::size_t steps = 100) {
  const auto g = unit_grid(n);
  mfg::DeclaredConstants d;
  d.L_G = 0.0;
  d.C_F = 0.4016;
  d.C_G = 0.0;
  auto cost = std::make_shared<const mfg::CostModel>(schelling_cost(g), mfg::make_zero_cost(2), d);
  const auto h = shifted_quadratic();
  return {g, mfg::TimeGrid(horizon, steps), {0.1, 0.1}, {h, h}, cost,
          mfg::DensityVector({cosine_density(g, 0.5), cosine_density(g, -0.5)})};
}

// m-independent costs, two populations.
inline mfg::MFGProblem decoupled_problem(std::size_t n = 60, std::size_t steps = 40, double horizon = 0.5) {
  const auto g = unit_grid(n);
  auto f1 = mfg::Field::from_function(g, [](const mfg::Vec2& x) { return 0.5 * std::cos(pi * x[0]); });
  auto f2 = mfg::Field::from_function(g, [](const mfg::Vec2& x) { return 0.3 * std::sin(pi * x[0]); });
  auto g1 = mfg::Field::from_function(g, [](const mfg::Vec2& x) { return 0.2 * std::cos(pi * x[0]); });
  mfg::DeclaredConstants d;
  d.L_F = 0.0;
  d.L_G = 0.0;
  d.C_F = 0.5;
  d.C_G = 0.2;
  auto cost = std::make_shared<const mfg::CostModel>(mfg::make_fixed_cost({f1, f2}),
                                                     mfg::make_fixed_cost({g1, mfg::Field(g)}), d);
  const auto h = quadratic();
  return {g, mfg::TimeGrid(horizon, steps), {0.1, 0.2}, {h, h}, cost,
          mfg::DensityVector({cosine_density(g, 0.8), cosine_density(g, -0.3)})};
}

inline mfg::Field random_field(const mfg::Grid& g, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  mfg::Field f(g);
  for (std::size_t c = 0; c < f.size(); ++c) f[c] = u(rng);
  return f;
}

}  // namespace fixtures

#pragma once

#include <cstdint>
#include <random>
#include <utility>

#include "mfg/field.hpp"

namespace mfg {

/// Reproducible generator of density vectors in P_N. Each component is
/// independently the uniform density, a normalized Gaussian bump with random
/// center and width, or a convex mixture of uniform and bumps, then clipped
/// at zero and renormalized.
class MeasureSampler {
 public:
  MeasureSampler(Grid grid, std::size_t populations, std::uint64_t seed);

  DensityVector draw();

  /// Half of the pairs are independent draws; the other half are a draw and
  /// a small convex perturbation of it, which probes the local regime.
  std::pair<DensityVector, DensityVector> draw_pair();

  const Grid& grid() const noexcept { return grid_; }
  std::size_t populations() const noexcept { return populations_; }

 private:
  Field draw_component();
  Field bump();

  Grid grid_;
  std::size_t populations_;
  std::mt19937_64 rng_;
  std::uint64_t pair_counter_ = 0;
};

}  // namespace mfg

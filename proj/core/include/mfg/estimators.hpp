#pragma once

#include <cstddef>
#include <string>

#include "mfg/cost.hpp"
#include "mfg/sampler.hpp"

namespace mfg {

/// Sampled lower bounds on the squared-norm Lipschitz constants
///   ||F(.,mu) - F(.,nu)||_2^2  <= L_F ||mu - nu||_2^2
///   ||DG(.,mu) - DG(.,nu)||_2^2 <= L_G ||mu - nu||_2^2
/// Norms are over L^2(Omega)^N.
struct LipschitzEstimate {
  double L_F = 0.0;
  double L_G = 0.0;
  std::size_t pairs_used = 0;
  bool empirical = true;
};

/// Throws InvalidInput if every sampled pair is degenerate (mu == nu).
LipschitzEstimate estimate_lipschitz(const CostModel& cost, MeasureSampler& sampler, std::size_t n_pairs);

/// sum_k int (F_k(x,mu) - F_k(x,nu)) (mu_k - nu_k) dx
double monotonicity_pairing(const CostModel& cost, const DensityVector& mu, const DensityVector& nu);

struct MonotonicityResult {
  double min_pairing = 0.0;
  DensityVector worst_mu;
  DensityVector worst_nu;
  std::size_t samples = 0;
  /// 1-based index of the first sample with a nonpositive pairing, 0 if none.
  std::size_t first_violation = 0;

  bool monotone() const noexcept { return min_pairing > 0.0; }
  std::string verdict() const { return monotone() ? "monotone on samples" : "violation found"; }
};

MonotonicityResult check_monotonicity(const CostModel& cost, MeasureSampler& sampler, std::size_t n_pairs);

/// L^2(Omega)^N distance between two density vectors.
double l2_distance(const DensityVector& a, const DensityVector& b);

}  // namespace mfg

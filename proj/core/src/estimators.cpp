#include "mfg/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfg/error.hpp"
#include "mfg/operators.hpp"

namespace mfg {

double l2_distance(const DensityVector& a, const DensityVector& b) {
  double sq = 0.0;
  for (std::size_t k = 0; k < a.populations(); ++k) {
    const double d = l2_norm(a[k] - b[k]);
    sq += d * d;
  }
  return std::sqrt(sq);
}

namespace {

double squared_distance(const std::vector<Field>& a, const std::vector<Field>& b) {
  double sq = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = l2_norm(a[k] - b[k]);
    sq += d * d;
  }
  return sq;
}

double squared_gradient_distance(const std::vector<Field>& a, const std::vector<Field>& b) {
  double sq = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const VectorField g = gradient(a[k] - b[k]);
    const double vol = g.grid().cell_volume();
    for (const Vec2& v : g.values()) sq += dot(v, v) * vol;
  }
  return sq;
}

}  // namespace

LipschitzEstimate estimate_lipschitz(const CostModel& cost, MeasureSampler& sampler, std::size_t n_pairs) {
  if (sampler.populations() != cost.populations()) {
    throw InvalidInput("estimate_lipschitz: sampler and cost disagree on the population count");
  }
  LipschitzEstimate est;
  for (std::size_t i = 0; i < n_pairs; ++i) {
    auto [mu, nu] = sampler.draw_pair();
    const double dm = l2_distance(mu, nu);
    if (dm == 0.0) continue;
    const double denom = dm * dm;
    est.L_F = std::max(est.L_F, squared_distance(cost.running(mu), cost.running(nu)) / denom);
    est.L_G = std::max(est.L_G, squared_gradient_distance(cost.terminal(mu), cost.terminal(nu)) / denom);
    ++est.pairs_used;
  }
  if (est.pairs_used == 0) throw InvalidInput("estimate_lipschitz: all sampled pairs were degenerate");
  return est;
}

double monotonicity_pairing(const CostModel& cost, const DensityVector& mu, const DensityVector& nu) {
  const auto fm = cost.running(mu);
  const auto fn = cost.running(nu);
  double acc = 0.0;
  for (std::size_t k = 0; k < fm.size(); ++k) {
    const Grid& g = fm[k].grid();
    double s = 0.0;
    for (std::size_t c = 0; c < g.size(); ++c) s += (fm[k][c] - fn[k][c]) * (mu[k][c] - nu[k][c]);
    acc += s * g.cell_volume();
  }
  return acc;
}

MonotonicityResult check_monotonicity(const CostModel& cost, MeasureSampler& sampler, std::size_t n_pairs) {
  if (sampler.populations() != cost.populations()) {
    throw InvalidInput("check_monotonicity: sampler and cost disagree on the population count");
  }
  MonotonicityResult res;
  res.min_pairing = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n_pairs; ++i) {
    auto [mu, nu] = sampler.draw_pair();
    if (l2_distance(mu, nu) == 0.0) continue;
    const double p = monotonicity_pairing(cost, mu, nu);
    ++res.samples;
    if (p <= 0.0 && res.first_violation == 0) res.first_violation = i + 1;
    if (p < res.min_pairing) {
      res.min_pairing = p;
      res.worst_mu = std::move(mu);
      res.worst_nu = std::move(nu);
    }
  }
  return res;
}

}  // namespace mfg

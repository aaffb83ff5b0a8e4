#include "mfg/sampler.hpp"

#include <cmath>

#include "mfg/error.hpp"

namespace mfg {

MeasureSampler::MeasureSampler(Grid grid, std::size_t populations, std::uint64_t seed)
    : grid_(grid), populations_(populations), rng_(seed) {
  if (populations == 0) throw InvalidInput("sampler: at least one population required");
}

Field MeasureSampler::bump() {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vec2 center{0.0, 0.0};
  Vec2 width{1.0, 1.0};
  for (int a = 0; a < grid_.dim(); ++a) {
    const Interval iv = grid_.extent(a);
    center[a] = iv.lo + unit(rng_) * iv.length();
    width[a] = (0.05 + 0.25 * unit(rng_)) * iv.length();
  }
  const int dim = grid_.dim();
  return Field::from_function(grid_, [&](const Vec2& x) {
    double e = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double z = (x[a] - center[a]) / width[a];
      e += 0.5 * z * z;
    }
    return std::exp(-e);
  });
}

Field MeasureSampler::draw_component() {
  std::uniform_int_distribution<int> pick(0, 2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Field uniform(grid_, 1.0 / grid_.measure());
  switch (pick(rng_)) {
    case 0:
      return uniform;
    case 1:
      return project_to_density(bump());
    default: {
      const int parts = 2 + static_cast<int>(unit(rng_) * 2.0);
      std::vector<double> w(static_cast<std::size_t>(parts) + 1);
      double total = 0.0;
      for (double& x : w) total += (x = 0.1 + unit(rng_));
      Field mix = (w[0] / total) * uniform;
      for (int i = 1; i <= parts; ++i) mix += (w[static_cast<std::size_t>(i)] / total) * project_to_density(bump());
      return project_to_density(std::move(mix));
    }
  }
}

DensityVector MeasureSampler::draw() {
  std::vector<Field> comps;
  comps.reserve(populations_);
  for (std::size_t k = 0; k < populations_; ++k) comps.push_back(draw_component());
  return DensityVector(std::move(comps));
}

std::pair<DensityVector, DensityVector> MeasureSampler::draw_pair() {
  DensityVector mu = draw();
  DensityVector nu = draw();
  if (pair_counter_++ % 2 == 1) {
    std::uniform_real_distribution<double> small(0.01, 0.2);
    for (std::size_t k = 0; k < populations_; ++k) {
      const double s = small(rng_);
      nu[k] = project_to_density((1.0 - s) * mu[k] + s * nu[k]);
    }
  }
  return {std::move(mu), std::move(nu)};
}

}  // namespace mfg

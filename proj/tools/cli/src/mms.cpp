#include "mfgcli/mms.hpp"

#include <cmath>
#include <numbers>

#include "mfg/hjb.hpp"
#include "mfg/operators.hpp"

namespace mfg::cli {

namespace {

constexpr double pi = std::numbers::pi;

Field solve_at_zero(const MmsSpec& spec, std::size_t cells, std::size_t steps) {
  const Grid grid({0.0, 1.0}, cells);
  const TimeGrid time(spec.horizon, steps);
  const auto h = make_power_hamiltonian(constant_fn(0.5), 0.0, 2.0);
  std::vector<Field> forcing;
  forcing.reserve(time.points());
  for (std::size_t j = 0; j < time.points(); ++j) {
    const double t = time.time(j);
    forcing.push_back(Field::from_function(grid, [&](const Vec2& x) { return manufactured_forcing(t, x[0], spec.viscosity); }));
  }
  const Field terminal = Field::from_function(grid, [&](const Vec2& x) { return manufactured_value(spec.horizon, x[0]); });
  return march_hjb(grid, time, spec.viscosity, *h, forcing, terminal)[0];
}

void fill_orders(std::vector<MmsRow>& rows) {
  for (std::size_t i = 1; i < rows.size(); ++i) rows[i].order = std::log2(rows[i - 1].error / rows[i].error);
}

}  // namespace

double manufactured_value(double t, double x) { return (1.0 + t) * std::cos(pi * x); }

double manufactured_forcing(double t, double x, double viscosity) {
  const double c = std::cos(pi * x);
  const double s = std::sin(pi * x);
  return -c + viscosity * pi * pi * (1.0 + t) * c + 0.5 * pi * pi * (1.0 + t) * (1.0 + t) * s * s;
}

MmsResult run_mms(const MmsSpec& spec) {
  MmsResult out;
  for (std::size_t n : spec.spatial_cells) {
    const Field v = solve_at_zero(spec, n, spec.spatial_steps);
    const Field exact = Field::from_function(v.grid(), [](const Vec2& x) { return manufactured_value(0.0, x[0]); });
    out.spatial.push_back({n, spec.spatial_steps, linf_norm(v - exact), std::nullopt});
  }
  const Field ref = solve_at_zero(spec, spec.temporal_cells, spec.reference_steps);
  for (std::size_t nt : spec.temporal_steps) {
    out.temporal.push_back({spec.temporal_cells, nt, linf_norm(solve_at_zero(spec, spec.temporal_cells, nt) - ref),
                            std::nullopt});
  }
  fill_orders(out.spatial);
  fill_orders(out.temporal);
  return out;
}

}  // namespace mfg::cli

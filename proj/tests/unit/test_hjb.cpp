#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "fixtures.hpp"
#include "mfg/error.hpp"
#include "mfg/hjb.hpp"

using namespace mfg;
using fixtures::pi;

namespace {

std::vector<Field> constant_forcing(const TimeGrid& t, const Field& f) { return std::vector<Field>(t.points(), f); }

// Tridiagonal Thomas solve of (I + dt nu L_N) x = rhs on a 1D cell grid.
std::vector<double> thomas_backward_step(const std::vector<double>& rhs, double dt, double nu, double h) {
  const std::size_t n = rhs.size();
  const double r = dt * nu / (h * h);
  std::vector<double> a(n, -r), b(n, 1.0 + 2.0 * r), c(n, -r), d = rhs;
  b.front() = 1.0 + r;
  b.back() = 1.0 + r;
  for (std::size_t i = 1; i < n; ++i) {
    const double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    d[i] -= w * d[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = d[n - 1] / b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (d[i] - c[i] * x[i + 1]) / b[i];
  return x;
}

class NanHamiltonian final : public Hamiltonian {
 public:
  NanHamiltonian() : Hamiltonian({}) {}
  double value(const Vec2&, const Vec2& p) const override { return p[0] > 0.0 ? NAN : 0.0; }
  Vec2 dp(const Vec2&, const Vec2&) const override { return {0.0, 0.0}; }
  std::string_view kind() const noexcept override { return "nan"; }
};

}  // namespace

TEST_CASE("constant terminal data with zero forcing stays constant") {
  const auto g = fixtures::unit_grid(30);
  const TimeGrid t(1.0, 20);
  const auto v = march_hjb(g, t, 0.3, *fixtures::quadratic(), constant_forcing(t, Field(g)), Field(g, 2.5));
  for (const auto& f : v.frames()) {
    for (std::size_t c = 0; c < g.size(); ++c) CHECK(std::abs(f[c] - 2.5) < 1e-13);
  }
}

TEST_CASE("discrete eigen-solution of the heat part") {
  const auto g = fixtures::unit_grid(40);
  const TimeGrid t(0.5, 25);
  const double nu = 0.7;
  const double h = g.spacing(0);
  const double lambda = (2.0 - 2.0 * std::cos(pi * h)) / (h * h);
  const Field terminal = Field::from_function(g, [](const Vec2& x) { return std::cos(pi * x[0]); });
  const auto v = march_hjb(g, t, nu, *fixtures::zero_hamiltonian(), constant_forcing(t, Field(g)), terminal);
  for (std::size_t j = 0; j < t.points(); ++j) {
    const double factor = std::pow(1.0 + t.dt() * nu * lambda, -static_cast<double>(t.steps() - j));
    for (std::size_t c = 0; c < g.size(); ++c) CHECK(std::abs(v[j][c] - factor * terminal[c]) < 1e-12);
  }
}

TEST_CASE("march agrees with an independent tridiagonal oracle") {
  const auto g = fixtures::unit_grid(25);
  const TimeGrid t(0.3, 15);
  const double nu = 0.2;
  const auto h = fixtures::quadratic();
  std::mt19937_64 rng(17);
  const Field terminal = Field::from_function(g, [](const Vec2& x) { return 0.2 * std::cos(pi * x[0]); });
  const Field forcing = fixtures::random_field(g, rng, 0.0, 0.1);
  const auto v = march_hjb(g, t, nu, *h, constant_forcing(t, forcing), terminal);

  std::vector<double> cur(terminal.values().begin(), terminal.values().end());
  for (std::size_t jj = t.steps(); jj-- > 0;) {
    const Field f(g, cur);
    const auto grad = gradient(f);
    double max_dp = 0.0;
    for (std::size_t c = 0; c < g.size(); ++c) max_dp = std::max(max_dp, std::abs(grad[c][0]));
    REQUIRE(t.dt() * max_dp <= g.spacing(0));  // no sub-stepping in this oracle
    std::vector<double> rhs(g.size());
    for (std::size_t c = 0; c < g.size(); ++c) rhs[c] = cur[c] + t.dt() * (forcing[c] - 0.5 * grad[c][0] * grad[c][0]);
    cur = thomas_backward_step(rhs, t.dt(), nu, g.spacing(0));
    for (std::size_t c = 0; c < g.size(); ++c) CHECK(std::abs(v[jj][c] - cur[c]) < 1e-12);
  }
}

TEST_CASE("terminal frame is exact") {
  const auto g = fixtures::unit_grid(17);
  const TimeGrid t(0.4, 9);
  std::mt19937_64 rng(2);
  const Field terminal = fixtures::random_field(g, rng);
  const auto v = march_hjb(g, t, 0.1, *fixtures::shifted_quadratic(), constant_forcing(t, Field(g)), terminal);
  CHECK(v[t.steps()] == terminal);
}

TEST_CASE("residual vanishes on a stationary constant") {
  const auto g = fixtures::unit_grid(20);
  const TimeGrid t(1.0, 10);
  const auto v = Trajectory::constant(t, Field(g, 3.0));
  // H(x, 0) = 1/2, F = 1/2
  const auto r = hjb_residual(v, 0.1, *fixtures::shifted_quadratic(), constant_forcing(t, Field(g, 0.5)));
  CHECK(r.max_abs() == 0.0);
}

TEST_CASE("manufactured residual decreases under refinement") {
  // v = exp(-t) cos(pi x), H = |p|^2/2, F chosen so that v solves the PDE
  const double nu = 0.5;
  const double horizon = 0.5;
  auto exact = [](double t, double x) { return std::exp(-t) * std::cos(pi * x); };
  double prev = INFINITY;
  for (std::size_t n : {20, 40, 80}) {
    const auto g = fixtures::unit_grid(n);
    const TimeGrid t(horizon, 4 * n);
    std::vector<Field> frames, forcing;
    for (std::size_t j = 0; j < t.points(); ++j) {
      const double s = t.time(j);
      frames.push_back(Field::from_function(g, [&](const Vec2& x) { return exact(s, x[0]); }));
      forcing.push_back(Field::from_function(g, [&](const Vec2& x) {
        const double e = std::exp(-s);
        const double dx = -pi * e * std::sin(pi * x[0]);
        return e * std::cos(pi * x[0]) + nu * pi * pi * e * std::cos(pi * x[0]) + 0.5 * dx * dx;
      }));
    }
    const auto r = hjb_residual(Trajectory(t, frames), nu, *fixtures::quadratic(), forcing);
    CHECK(r.max_abs() < prev);
    prev = r.max_abs();
  }
  CHECK(prev < 1e-2);
}

TEST_CASE("comparison principle with H = 0") {
  std::mt19937_64 rng(23);
  for (const Grid& g : {fixtures::unit_grid(50), Grid({0.0, 1.0}, 12, {0.0, 1.0}, 9)}) {
    const TimeGrid t(1.0, 30);
    for (int trial = 0; trial < 5; ++trial) {
      const Field g1 = fixtures::random_field(g, rng);
      Field g2 = g1;
      const Field bump = fixtures::random_field(g, rng, 0.0, 1.0);
      g2 += bump;
      std::vector<Field> f1, f2;
      for (std::size_t j = 0; j < t.points(); ++j) {
        f1.push_back(fixtures::random_field(g, rng));
        f2.push_back(f1.back() + fixtures::random_field(g, rng, 0.0, 0.5));
      }
      const auto h = fixtures::zero_hamiltonian();
      const auto v1 = march_hjb(g, t, 0.05, *h, f1, g1);
      const auto v2 = march_hjb(g, t, 0.05, *h, f2, g2);
      for (std::size_t j = 0; j < t.points(); ++j) {
        const double scale = std::max(1.0, v2[j].max() - v2[j].min());
        for (std::size_t c = 0; c < g.size(); ++c) CHECK(v1[j][c] <= v2[j][c] + 1e-12 * scale);
      }
    }
  }
}

TEST_CASE("non-finite Hamiltonian raises SolverError") {
  const auto g = fixtures::unit_grid(10);
  const TimeGrid t(1.0, 5);
  const Field terminal = Field::from_function(g, [](const Vec2& x) { return x[0]; });
  CHECK_THROWS_AS(march_hjb(g, t, 0.1, NanHamiltonian(), constant_forcing(t, Field(g)), terminal), SolverError);
  try {
    march_hjb(g, t, 0.1, NanHamiltonian(), constant_forcing(t, Field(g)), terminal);
  } catch (const SolverError& e) {
    CHECK(e.step() == std::optional<std::size_t>(4));
  }
}

TEST_CASE("CFL sub-stepping keeps steep data stable") {
  const auto g = fixtures::unit_grid(50);
  const TimeGrid t(0.2, 2);  // dt |Dv| far above h
  const Field terminal = Field::from_function(g, [](const Vec2& x) { return 5.0 * std::cos(pi * x[0]); });
  const auto v = march_hjb(g, t, 0.05, *fixtures::quadratic(), constant_forcing(t, Field(g)), terminal);
  CHECK(v.max_abs() <= terminal.max() + 1e-12);
  for (const auto& f : v.frames()) CHECK(f.all_finite());
}

TEST_CASE("multi-population problem validation") {
  const auto p = fixtures::schelling_problem(0.05, 20, 10);
  HJBProblem hp{p.grid, p.time, p.viscosity, p.hamiltonians, p.cost,
                {Trajectory::constant(p.time, p.initial[0]), Trajectory::constant(p.time, p.initial[1])}};
  const auto v = solve_hjb_backward(hp);
  CHECK(v.size() == 2);
  const auto res = hjb_residual(v, hp);
  CHECK(res.size() == 2);
  hp.viscosity = {0.1};
  CHECK_THROWS_AS(solve_hjb_backward(hp), InvalidInput);
}

#include <cmath>

#include <doctest.h>

#include "fixtures.hpp"
#include "mfg/error.hpp"
#include "mfg/hjb.hpp"
#include "mfg/kfp.hpp"

using namespace mfg;

namespace {

PicardOptions undamped() {
  PicardOptions o;
  o.damping = 1.0;
  o.max_iterations = 50;
  return o;
}

PopulationTrajectories constant_guess(const MFGProblem& p, const DensityVector& d) {
  PopulationTrajectories g;
  for (std::size_t k = 0; k < p.populations(); ++k) g.push_back(Trajectory::constant(p.time, d[k]));
  return g;
}

}  // namespace

TEST_CASE("decoupled system converges on the second undamped sweep") {
  const auto p = fixtures::decoupled_problem();
  const auto a = picard_solve(p, undamped());
  CHECK(a.solution.converged);
  CHECK(a.solution.iterations == 2);
  CHECK(a.solution.residual == 0.0);

  const DensityVector other({fixtures::cosine_density(p.grid, -0.9), fixtures::uniform_density(p.grid)});
  const auto b = picard_solve(p, undamped(), constant_guess(p, other));
  CHECK(b.solution.iterations == 2);
  CHECK(b.solution.densities == a.solution.densities);

  PicardOptions damped;
  damped.damping = 0.5;
  const auto c = picard_solve(p, damped);
  CHECK(c.solution.converged);
  CHECK(trajectory_distance(c.solution.densities, a.solution.densities) <= 1e-8);
}

TEST_CASE("zero data gives the heat flow") {
  auto p = fixtures::decoupled_problem(40, 20, 0.3);
  p.cost = std::make_shared<const CostModel>(make_zero_cost(2), make_zero_cost(2));
  const auto r = picard_solve(p, undamped());
  CHECK(r.solution.converged);
  for (const auto& v : r.solution.values) CHECK(v.max_abs() == 0.0);
  for (std::size_t k = 0; k < 2; ++k) {
    const auto heat = march_kfp(p.grid, p.time, p.viscosity[k], DriftTrajectory(p.time.points(), VectorField(p.grid)),
                                p.initial[k]);
    CHECK(r.solution.densities[k] == heat);
  }
}

TEST_CASE("Schelling small horizon fixed point") {
  const auto p = fixtures::schelling_problem();
  const auto r = picard_solve(p, PicardOptions{});
  CHECK(r.solution.converged);
  CHECK(r.solution.iterations == 26);
  CHECK(r.solution.residual <= 1e-9);
  CHECK(r.trace.residuals.size() == r.solution.iterations);
  CHECK(r.trace.residuals.back() == r.solution.residual);
  CHECK(r.trace.damping == 0.5);
  CHECK(r.trace.wall_seconds > 0.0);

  // v(T) = G(., m(T)) and v solves the HJB for the returned densities
  const auto g = p.cost->terminal(density_at(r.solution.densities, p.time.steps()));
  for (std::size_t k = 0; k < 2; ++k) CHECK(r.solution.values[k][p.time.steps()] == g[k]);
  const auto v = solve_hjb_backward(
      HJBProblem{p.grid, p.time, p.viscosity, p.hamiltonians, p.cost, r.solution.densities});
  CHECK(v == r.solution.values);

  for (const auto& m : r.solution.densities) {
    for (const auto& f : m.frames()) {
      CHECK(std::abs(integrate(f) - 1.0) <= 1e-12);
      CHECK(f.min() >= -1e-12);
    }
  }

  const auto again = picard_solve(p, PicardOptions{});
  CHECK(again.solution.densities == r.solution.densities);
  CHECK(again.trace.residuals == r.trace.residuals);
}

TEST_CASE("multistart probes") {
  const auto d = multistart_probe(fixtures::decoupled_problem(), 3, undamped(), 5);
  CHECK(d.converged_runs == 3);
  REQUIRE(d.max_pairwise_distance);
  CHECK(*d.max_pairwise_distance == 0.0);
  CHECK(*d.unique_observed);

  const auto p = fixtures::schelling_problem();
  const auto guesses = multistart_initial_guesses(p, 4, 7 + 3);
  CHECK(guesses.size() == 4);
  CHECK(guesses[0][0][0] == p.initial[0]);
  CHECK_FALSE(guesses[1][0][0] == guesses[2][0][0]);

  const auto s = multistart_probe(p, 4, PicardOptions{}, 7 + 3, 2);
  CHECK(s.converged_runs == 4);
  REQUIRE(s.max_pairwise_distance);
  CHECK(*s.max_pairwise_distance <= 1e-8);
  CHECK(*s.unique_observed);

  const auto serial = multistart_probe(p, 4, PicardOptions{}, 7 + 3, 1);
  for (std::size_t i = 0; i < 4; ++i) CHECK(serial.runs[i].solution.densities == s.runs[i].solution.densities);

  CHECK_THROWS_AS(multistart_probe(p, 1, PicardOptions{}, 1), InvalidInput);
}

TEST_CASE("non-convergence is reported, not thrown") {
  PicardOptions o;
  o.max_iterations = 3;
  const auto r = picard_solve(fixtures::schelling_problem(), o);
  CHECK_FALSE(r.solution.converged);
  CHECK(r.solution.iterations == 3);
  CHECK(r.trace.residuals.size() == 3);
  CHECK(r.solution.residual > o.tolerance);

  const auto ms = multistart_probe(fixtures::schelling_problem(), 2, o, 1);
  CHECK(ms.converged_runs == 0);
  CHECK_FALSE(ms.max_pairwise_distance);
  CHECK_FALSE(ms.unique_observed);
}

TEST_CASE("invalid options and problems are rejected") {
  const auto p = fixtures::decoupled_problem(20, 10);
  for (const PicardOptions& o : {PicardOptions{0.0, 1e-9, 10}, PicardOptions{1.5, 1e-9, 10},
                                 PicardOptions{0.5, 0.0, 10}, PicardOptions{0.5, 1e-9, 0}}) {
    CHECK_THROWS_AS(picard_solve(p, o), InvalidInput);
  }
  auto bad = p;
  bad.viscosity = {0.1, 0.0};
  CHECK_THROWS_AS(picard_solve(bad, PicardOptions{}), InvalidInput);
  bad = p;
  bad.hamiltonians.pop_back();
  CHECK_THROWS_AS(picard_solve(bad, PicardOptions{}), InvalidInput);

  auto guess = constant_guess(p, p.initial);
  guess[0][3] *= 2.0;
  CHECK_THROWS_AS(picard_solve(p, PicardOptions{}, guess), InvalidInput);
}

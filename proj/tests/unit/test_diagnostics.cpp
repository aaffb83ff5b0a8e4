#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <doctest.h>

#include "fixtures.hpp"
#include "mfg/diagnostics.hpp"
#include "mfg/error.hpp"
#include "mfg/kfp.hpp"

using namespace mfg;
using fixtures::pi;

namespace {

MFGSolution solution_with_values(const Grid& g, const TimeGrid& t, std::vector<Field> values) {
  MFGSolution s;
  for (auto& v : values) {
    s.values.push_back(Trajectory::constant(t, v));
    s.densities.push_back(Trajectory::constant(t, fixtures::uniform_density(g)));
  }
  s.converged = true;
  return s;
}

MFGProblem heat_problem(const Field& m0, double horizon = 0.5) {
  const Grid& g = m0.grid();
  return {g,
          TimeGrid(horizon, 50),
          {0.2},
          {fixtures::quadratic()},
          std::make_shared<const CostModel>(make_zero_cost(1), make_zero_cost(1)),
          DensityVector({m0})};
}

PicardOptions undamped() {
  PicardOptions o;
  o.damping = 1.0;
  return o;
}

}  // namespace

TEST_CASE("gradient range constants examples") {
  const auto g = fixtures::unit_grid(20);
  const TimeGrid t(1.0, 4);
  const std::vector<HamiltonianPtr> quad{fixtures::quadratic()};

  const std::vector<MFGSolution> flat{solution_with_values(g, t, {Field(g, 3.0)})};
  const auto c0 = gradient_range_constants(flat, quad);
  CHECK(c0.C_H == 0.0);
  CHECK(c0.C_bar_H == doctest::Approx(1.0).epsilon(1e-9));

  // v = 2x - 1 has gradient 2 inside and 1 at the walls; v = -2x gives -2
  const std::vector<MFGSolution> ramps{
      solution_with_values(g, t, {Field::from_function(g, [](const Vec2& x) { return 2.0 * x[0]; })}),
      solution_with_values(g, t, {Field::from_function(g, [](const Vec2& x) { return -2.0 * x[0]; })})};
  const auto c1 = gradient_range_constants(ramps, quad);
  CHECK(c1.box_lo[0] == doctest::Approx(-2.0));
  CHECK(c1.box_hi[0] == doctest::Approx(2.0));
  CHECK(c1.C_H == doctest::Approx(2.0));
  CHECK(c1.C_bar_H == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(c1.pairwise_lipschitz == doctest::Approx(1.0).epsilon(1e-12));

  const std::vector<MFGSolution> reversed{ramps[1], ramps[0]};
  const auto c2 = gradient_range_constants(reversed, quad);
  CHECK(c2.C_H == c1.C_H);
  CHECK(c2.C_bar_H == c1.C_bar_H);

  const std::vector<HamiltonianPtr> robust{
      make_robust_hamiltonian(constant_vector_fn({0.0, 0.0}), constant_fn(1.0), constant_fn(1.0), 2.0)};
  const auto c3 = constants_on_box(g, robust, {-3.0, 0.0}, {3.0, 0.0});
  CHECK(c3.C_H == doctest::Approx(1.5));
  CHECK(c3.C_bar_H == doctest::Approx(0.5).epsilon(1e-9));

  const std::vector<HamiltonianPtr> bad{make_power_hamiltonian(
      [](const Vec2& x) { return x[0] > 0.5 ? NAN : 1.0; }, 1.0, 2.0)};
  CHECK_THROWS_WITH_AS(constants_on_box(g, bad, {-1.0, 0.0}, {1.0, 0.0}), doctest::Contains("non-finite D_pH at x"),
                       InvalidInput);
  CHECK_THROWS_AS(gradient_range_constants(std::vector<MFGSolution>{}, quad), InvalidInput);
}

TEST_CASE("gradient range constants in 2D") {
  const Grid g({0.0, 1.0}, 6, {0.0, 1.0}, 5);
  const std::vector<HamiltonianPtr> hs{make_bellman_hamiltonian(
      constant_vector_fn({0.0, 0.0}), [](const Vec2&) { return Mat2{{{2.0, 0.0}, {0.0, 1.0}}}; }, 2.0)};
  // D_pH = g g^T p = diag(4, 1) p
  const auto c = constants_on_box(g, hs, {-1.0, -1.0}, {1.0, 1.0});
  CHECK(c.C_H == doctest::Approx(std::sqrt(17.0)));
  CHECK(c.C_bar_H == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("psi closed form") {
  CHECK(std::abs(compute_psi({1.0, 0.0, 0.5, 1.0, 1.0, 1.0, 1.0}) - std::numbers::e / 2.0) <= 1e-12);
  CHECK(compute_psi({0.0, 3.0, 2.0, 5.0, 4.0, 2.0, 7.0}) == 0.0);
  CHECK(compute_psi({1.0, 3.0, 2.0, 5.0, 0.0, 2.0, 7.0}) == 0.0);
  CHECK(compute_psi({1.0, 0.0, 0.0, 5.0, 1.0, 2.0, 7.0}) == 0.0);
  // C_H below 1 is raised to 1
  CHECK(compute_psi({1.0, 0.0, 0.5, 0.2, 1.0, 1.0, 1.0}) == compute_psi({1.0, 0.0, 0.5, 1.0, 1.0, 1.0, 1.0}));
  // T=0.5, L_F=2, L_G=0, C=2: 0.5 * 1 * (2 e^{4} * 1) * (2*2*0.5/2)
  CHECK(compute_psi({0.5, 2.0, 0.0, 2.0, 1.0, 1.0, 1.0}) == doctest::Approx(0.5 * 2.0 * std::exp(4.0) * 1.0));
  CHECK_THROWS_AS(compute_psi({-1.0, 0.0, 0.5, 1.0, 1.0, 1.0, 1.0}), InvalidInput);
  CHECK_THROWS_AS(compute_psi({1.0, 0.0, 0.5, 1.0, 1.0, 1.0, -1e-9}), InvalidInput);
  CHECK_THROWS_AS(compute_psi({1.0, NAN, 0.5, 1.0, 1.0, 1.0, 1.0}), InvalidInput);
}

TEST_CASE("psi is monotone in each argument") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  std::uniform_int_distribution<int> which(0, 6);
  for (int s = 0; s < 1000; ++s) {
    std::array<double, 7> a{};
    for (double& v : a) v = u(rng);
    const int i = which(rng);
    std::array<double, 7> b = a;
    b[static_cast<std::size_t>(i)] += u(rng);
    auto psi = [](const std::array<double, 7>& x) { return compute_psi({x[0], x[1], x[2], x[3], x[4], x[5], x[6]}); };
    CAPTURE(i);
    CHECK(psi(b) >= psi(a));
  }
}

TEST_CASE("certificate verdicts and thresholds") {
  auto declared = [](double v) { return Ingredient{v, Provenance::Declared}; };
  CertificateInputs in{0.2, 2, declared(0.5), declared(0.1), declared(1.5), declared(1.0), declared(2.0)};
  const auto c = certify(in);
  CHECK(c.psi < 1.0);
  CHECK(c.all_declared);
  CHECK(c.verdict == "certified small-data regime");

  auto psi_with = [&](double T, double cb, double scale) {
    return compute_psi({T, scale * in.L_F.value, scale * in.L_G.value, in.C_H.value, cb, 2.0, in.M.value});
  };
  REQUIRE(c.horizon_threshold);
  REQUIRE(c.c_bar_h_threshold);
  REQUIRE(c.lipschitz_scale_threshold);
  CHECK(psi_with(*c.horizon_threshold, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(psi_with(0.2, *c.c_bar_h_threshold, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(psi_with(0.2, 1.0, *c.lipschitz_scale_threshold) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(*c.horizon_threshold > 0.2);

  in.L_G.provenance = Provenance::Empirical;
  CHECK(certify(in).verdict == "empirical");
  in.T = 5.0;
  CHECK(certify(in).verdict == "not small");

  CertificateInputs zero{0.5, 1, declared(0.0), declared(0.0), declared(1.0), declared(1.0), declared(1.0)};
  const auto z = certify(zero);
  CHECK(z.psi == 0.0);
  CHECK(z.verdict == "certified small-data regime");
  CHECK_FALSE(z.horizon_threshold);
  CHECK_FALSE(z.lipschitz_scale_threshold);
}

TEST_CASE("value bound examples") {
  const auto g = fixtures::unit_grid(20);
  const TimeGrid t(1.0, 10);
  const auto zero = solution_with_values(g, t, {Field(g)});
  const auto a = value_bound_check(zero, 0.0, 0.0, 0.0, t, g);
  CHECK(a.pass);
  CHECK(a.bound == 0.0);
  CHECK(a.margin == 0.0);

  const auto one = solution_with_values(g, t, {Field(g, 1.0)});
  const auto b = value_bound_check(one, 0.0, 1.0, 0.0, t, g);
  CHECK(b.pass);
  CHECK(b.bound == 1.0);
  CHECK(b.tol_scheme == doctest::Approx(10.0 * (0.1 + 0.0025)));

  const auto big = solution_with_values(g, t, {Field(g, 10.0)});
  CHECK_FALSE(value_bound_check(big, 0.5, 1.0, 0.2, t, g).pass);
}

TEST_CASE("value bound survives a constant shift of H") {
  auto p = fixtures::schelling_problem(0.05, 50, 50);
  const auto base = picard_solve(p, PicardOptions{});
  const auto b0 = value_bound_check(base.solution, 0.4016, 0.0, 1.21, p.time, p.grid);
  CHECK(b0.pass);
  for (double shift : {-2.0, 3.0}) {
    auto q = p;
    for (auto& h : q.hamiltonians) h = make_shifted_hamiltonian(h, shift);
    const auto r = picard_solve(q, PicardOptions{});
    const double alpha = *q.hamiltonians[0]->metadata().alpha;
    CHECK(alpha == doctest::Approx(1.21 + std::abs(shift)));
    CHECK(value_bound_check(r.solution, 0.4016, 0.0, alpha, q.time, q.grid).pass);
  }
}

TEST_CASE("density bound report") {
  const auto g = fixtures::unit_grid(50);
  const auto u = heat_problem(fixtures::uniform_density(g), 0.7);
  const auto ru = picard_solve(u, undamped());
  const auto eu = density_bound_report(ru.solution, u.initial, u.hamiltonians);
  CHECK(eu.T == doctest::Approx(0.7));
  CHECK(eu.M == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eu.sup_drift[0] == 0.0);
  // 1 + ||m0|| + (1+T) * 0
  CHECK(eu.bracket[0] == doctest::Approx(2.0).epsilon(1e-12));

  const auto c = heat_problem(fixtures::cosine_density(g, 1.0), 2.0);
  const auto rc = picard_solve(c, undamped());
  const auto ec = density_bound_report(rc.solution, c.initial, c.hamiltonians);
  CHECK(ec.M == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(ec.M == c.initial[0].max());
  double prev = INFINITY;
  for (const auto& f : rc.solution.densities[0].frames()) {
    CHECK(f.max() <= prev);
    prev = f.max();
  }
  CHECK(prev < 1.1);

  CHECK_THROWS_AS(density_bound_report(rc.solution, DensityVector({c.initial[0], c.initial[0]}), c.hamiltonians),
                  InvalidInput);
}

TEST_CASE("density bound fit") {
  std::vector<DensityBoundEntry> entries;
  for (double b : {2.0, 3.0, 5.0, 8.0}) {
    DensityBoundEntry e;
    e.bracket = {b};
    e.sup_density = {1.5 * std::pow(b, 1.7)};
    entries.push_back(e);
  }
  const auto fit = fit_density_bound(entries);
  REQUIRE(fit);
  CHECK(fit->r == doctest::Approx(1.7));
  CHECK(fit->C == doctest::Approx(1.5));
  for (bool v : fit->violations) CHECK_FALSE(v);

  entries.push_back(DensityBoundEntry{});
  entries.back().bracket = {4.0};
  entries.back().sup_density = {50.0 * std::pow(4.0, 1.7)};
  const auto outlier = fit_density_bound(entries);
  REQUIRE(outlier);
  CHECK(outlier->violations.back());

  std::vector<DensityBoundEntry> flat(3);
  for (auto& e : flat) {
    e.bracket = {2.0};
    e.sup_density = {1.0};
  }
  CHECK_FALSE(fit_density_bound(flat));
  CHECK_FALSE(fit_density_bound(std::vector<DensityBoundEntry>{}));
}

TEST_CASE("continuous dependence") {
  const auto g = fixtures::unit_grid(50);
  const std::vector<double> eps{1e-2, 1e-3, 1e-4};
  const auto heat = heat_problem(fixtures::cosine_density(g, 0.5));
  const auto h = continuous_dependence_probe(heat, eps, undamped(), 3);
  CHECK(h.baseline_converged);
  REQUIRE(h.rows.size() == 3);
  for (const auto& r : h.rows) {
    CHECK(r.converged);
    CHECK(r.ratio <= 1.0 + 1e-9);
  }
  CHECK(h.bounded);

  const auto s = continuous_dependence_probe(fixtures::schelling_problem(), eps, PicardOptions{}, 7 + 2);
  CHECK(s.baseline_converged);
  REQUIRE(s.spread);
  CHECK(*s.spread <= 10.0);
  CHECK(s.bounded);
  for (const auto& r : s.rows) CHECK(r.ratio == doctest::Approx(1.0).epsilon(1e-6));

  const std::vector<double> bad{0.0};
  CHECK_THROWS_AS(continuous_dependence_probe(heat, bad, undamped(), 3), InvalidInput);
}

#include "mfg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mfg/error.hpp"
#include "mfg/estimators.hpp"
#include "mfg/kfp.hpp"
#include "mfg/operators.hpp"
#include "mfg/sampler.hpp"

namespace mfg {

namespace {

// Largest singular value of the 2x2 matrix [[a, b], [c, d]].
double spectral_norm(double a, double b, double c, double d) {
  const double t = a * a + b * b + c * c + d * d;
  const double det = a * d - b * c;
  const double disc = std::max(0.0, t * t - 4.0 * det * det);
  return std::sqrt(0.5 * (t + std::sqrt(disc)));
}

std::vector<Vec2> lattice_points(int dim, const Vec2& lo, const Vec2& hi, std::size_t n) {
  auto axis_points = [n](double a, double b) {
    std::vector<double> pts;
    if (a == b || n < 2) return std::vector<double>{a};
    for (std::size_t i = 0; i < n; ++i) pts.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    return pts;
  };
  const auto xs = axis_points(lo[0], hi[0]);
  const auto ys = dim == 2 ? axis_points(lo[1], hi[1]) : std::vector<double>{0.0};
  std::vector<Vec2> out;
  for (double y : ys) {
    for (double x : xs) out.push_back({x, y});
  }
  return out;
}

}  // namespace

GradientRangeConstants constants_on_box(const Grid& grid, std::span<const HamiltonianPtr> hamiltonians,
                                        const Vec2& lo, const Vec2& hi, std::size_t lattice) {
  if (hamiltonians.empty()) throw InvalidInput("gradient_range_constants: no Hamiltonians");
  GradientRangeConstants out;
  out.box_lo = lo;
  out.box_hi = hi;
  const auto pts = lattice_points(grid.dim(), lo, hi, lattice);
  std::vector<Vec2> dps(pts.size());

  for (const auto& h : hamiltonians) {
    for (std::size_t c = 0; c < grid.size(); ++c) {
      const Vec2 x = grid.center(c);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        dps[i] = h->dp(x, pts[i]);
        if (!std::isfinite(dps[i][0]) || !std::isfinite(dps[i][1])) {
          throw InvalidInput("gradient_range_constants: non-finite D_pH at x = (" + std::to_string(x[0]) + ", " +
                             std::to_string(x[1]) + "), p = (" + std::to_string(pts[i][0]) + ", " +
                             std::to_string(pts[i][1]) + ")");
        }
        out.C_H = std::max(out.C_H, norm(dps[i]));

        std::array<Vec2, 2> cols{Vec2{0.0, 0.0}, Vec2{0.0, 0.0}};
        for (int a = 0; a < grid.dim(); ++a) {
          const double step = 1e-5 * std::max(1.0, norm(pts[i]));
          Vec2 up = pts[i];
          Vec2 dn = pts[i];
          up[a] += step;
          dn[a] -= step;
          const Vec2 du = h->dp(x, up);
          const Vec2 dd = h->dp(x, dn);
          cols[a] = {(du[0] - dd[0]) / (2.0 * step), (du[1] - dd[1]) / (2.0 * step)};
        }
        const double jn = grid.dim() == 1 ? std::abs(cols[0][0])
                                          : spectral_norm(cols[0][0], cols[1][0], cols[0][1], cols[1][1]);
        out.jacobian_lipschitz = std::max(out.jacobian_lipschitz, jn);
      }
      for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
          const double dp = norm(Vec2{pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]});
          if (dp == 0.0) continue;
          const double dv = norm(Vec2{dps[i][0] - dps[j][0], dps[i][1] - dps[j][1]});
          out.pairwise_lipschitz = std::max(out.pairwise_lipschitz, dv / dp);
        }
      }
    }
  }
  out.C_bar_H = std::max(out.pairwise_lipschitz, out.jacobian_lipschitz);
  return out;
}

GradientRangeConstants gradient_range_constants(std::span<const MFGSolution> solutions,
                                                std::span<const HamiltonianPtr> hamiltonians, std::size_t lattice) {
  if (solutions.empty()) throw InvalidInput("gradient_range_constants: at least one solution required");
  constexpr double inf = std::numeric_limits<double>::infinity();
  Vec2 lo{inf, inf};
  Vec2 hi{-inf, -inf};
  const Grid& grid = solutions.front().values.front().grid();
  for (const auto& sol : solutions) {
    if (sol.values.size() != hamiltonians.size()) {
      throw InvalidInput("gradient_range_constants: solution and Hamiltonian counts differ");
    }
    for (const auto& traj : sol.values) {
      for (const auto& frame : traj.frames()) {
        const VectorField g = gradient(frame);
        for (const Vec2& p : g.values()) {
          for (int a = 0; a < 2; ++a) {
            lo[a] = std::min(lo[a], p[a]);
            hi[a] = std::max(hi[a], p[a]);
          }
        }
      }
    }
  }
  return constants_on_box(grid, hamiltonians, lo, hi, lattice);
}

double compute_psi(const PsiInputs& in) {
  for (double v : {in.T, in.L_F, in.L_G, in.C_H, in.C_bar_H, in.N, in.M}) {
    if (!(v >= 0.0)) throw InvalidInput("compute_psi: inputs must be nonnegative");
  }
  const double ch = std::max(in.C_H, 1.0);
  const double lip = in.L_G + in.L_F * ch * in.T / 2.0;
  if (in.T == 0.0 || in.C_bar_H == 0.0 || in.N == 0.0 || in.M == 0.0 || lip == 0.0) return 0.0;
  const double c = in.N * ch * std::exp(std::pow(ch, 4) * in.T * in.T) * in.M * in.M;
  return in.T * in.C_bar_H * in.C_bar_H * c * lip;
}

Certificate certify(const CertificateInputs& in) {
  PsiInputs base{in.T,           in.L_F.value, in.L_G.value, in.C_H.value, in.C_bar_H.value,
                 static_cast<double>(in.N), in.M.value};
  Certificate cert;
  cert.psi = compute_psi(base);
  cert.all_declared = true;
  for (const Ingredient* g : {&in.L_F, &in.L_G, &in.C_H, &in.C_bar_H, &in.M}) {
    if (g->provenance != Provenance::Declared) cert.all_declared = false;
  }
  if (cert.psi < 1.0) {
    cert.verdict = cert.all_declared ? "certified small-data regime" : "empirical";
  } else {
    cert.verdict = "not small";
  }

  PsiInputs unit_cb = base;
  unit_cb.C_bar_H = 1.0;
  if (const double p1 = compute_psi(unit_cb); p1 > 0.0 && std::isfinite(p1)) cert.c_bar_h_threshold = 1.0 / std::sqrt(p1);
  if (cert.psi > 0.0 && std::isfinite(cert.psi)) cert.lipschitz_scale_threshold = 1.0 / cert.psi;

  PsiInputs probe = base;
  probe.T = 1.0;
  if (compute_psi(probe) > 0.0) {
    double lo = 0.0;
    double hi = 1.0;
    while (compute_psi(PsiInputs{hi, base.L_F, base.L_G, base.C_H, base.C_bar_H, base.N, base.M}) < 1.0 && hi < 1e12) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (compute_psi(PsiInputs{mid, base.L_F, base.L_G, base.C_H, base.C_bar_H, base.N, base.M}) < 1.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    cert.horizon_threshold = lo;
  }
  return cert;
}

ValueBoundCheck value_bound_check(const MFGSolution& solution, double C_F, double C_G, double alpha,
                                  const TimeGrid& time, const Grid& grid) {
  ValueBoundCheck chk;
  for (const auto& v : solution.values) chk.observed = std::max(chk.observed, v.max_abs());
  chk.bound = C_G + time.horizon() * (C_F + alpha);
  const double h = grid.max_spacing();
  chk.tol_scheme = 10.0 * (time.dt() + h * h) * (C_F + alpha + C_G);
  chk.margin = chk.bound + chk.tol_scheme - chk.observed;
  chk.pass = chk.margin >= 0.0;
  return chk;
}

DensityBoundEntry density_bound_report(const MFGSolution& solution, const DensityVector& initial,
                                       std::span<const HamiltonianPtr> hamiltonians) {
  const std::size_t n = solution.densities.size();
  if (initial.populations() != n || hamiltonians.size() != n || solution.values.size() != n) {
    throw InvalidInput("density_bound_report: population count mismatch");
  }
  DensityBoundEntry e;
  e.T = solution.densities.front().time().horizon();
  for (std::size_t k = 0; k < n; ++k) {
    double sup_m = 0.0;
    for (const auto& f : solution.densities[k].frames()) sup_m = std::max(sup_m, f.max());
    double sup_b = 0.0;
    for (const auto& b : drift_from_values(solution.values[k], *hamiltonians[k])) sup_b = std::max(sup_b, b.max_norm());
    const double sup_0 = initial[k].max();
    e.sup_density.push_back(sup_m);
    e.sup_initial.push_back(sup_0);
    e.sup_drift.push_back(sup_b);
    e.bracket.push_back(1.0 + sup_0 + (1.0 + e.T) * sup_b);
    e.M = std::max(e.M, sup_m);
  }
  return e;
}

std::optional<DensityBoundFit> fit_density_bound(std::span<const DensityBoundEntry> entries) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& e : entries) {
    for (std::size_t k = 0; k < e.bracket.size(); ++k) {
      xs.push_back(std::log(e.bracket[k]));
      ys.push_back(std::log(e.sup_density[k]));
    }
  }
  if (xs.size() < 2) return std::nullopt;
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx <= 1e-14 * n) return std::nullopt;
  DensityBoundFit fit;
  fit.r = sxy / sxx;
  fit.C = std::exp(my - fit.r * mx);
  for (const auto& e : entries) {
    for (std::size_t k = 0; k < e.bracket.size(); ++k) {
      fit.violations.push_back(e.sup_density[k] > 2.0 * fit.C * std::pow(e.bracket[k], fit.r));
    }
  }
  return fit;
}

ContinuousDependenceReport continuous_dependence_probe(const MFGProblem& problem, std::span<const double> epsilons,
                                                       const PicardOptions& options, std::uint64_t seed) {
  problem.validate();
  ContinuousDependenceReport rep;
  const PicardResult base = picard_solve(problem, options);
  rep.baseline_converged = base.solution.converged;

  MeasureSampler sampler(problem.grid, problem.populations(), seed);
  DensityVector target = sampler.draw();
  for (int tries = 0; l2_distance(target, problem.initial) == 0.0; ++tries) {
    if (tries > 100) throw InvalidInput("continuous_dependence_probe: could not draw a perturbation direction");
    target = sampler.draw();
  }

  for (double eps : epsilons) {
    if (!(eps > 0.0 && eps <= 1.0)) throw InvalidInput("continuous_dependence_probe: epsilon must lie in (0,1]");
    MFGProblem perturbed = problem;
    std::vector<Field> comps;
    for (std::size_t k = 0; k < problem.populations(); ++k) {
      comps.push_back((1.0 - eps) * problem.initial[k] + eps * target[k]);
    }
    perturbed.initial = DensityVector(std::move(comps));
    const PicardResult run = picard_solve(perturbed, options);

    PerturbationRow row;
    row.epsilon = eps;
    row.converged = run.solution.converged && base.solution.converged;
    const double d0 = l2_distance(perturbed.initial, problem.initial);
    const double dt = trajectory_distance(run.solution.densities, base.solution.densities);
    row.ratio = (dt * dt) / (d0 * d0);
    rep.rows.push_back(row);
  }

  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& r : rep.rows) {
    if (!r.converged) continue;
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
  }
  if (hi > 0.0 && std::isfinite(lo)) {
    rep.spread = hi / lo;
    rep.bounded = *rep.spread <= 10.0;
  }
  return rep;
}

}  // namespace mfg

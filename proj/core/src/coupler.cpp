#include "mfg/coupler.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "mfg/error.hpp"
#include "mfg/hjb.hpp"
#include "mfg/kfp.hpp"
#include "mfg/operators.hpp"
#include "mfg/sampler.hpp"

namespace mfg {

void MFGProblem::validate() const {
  const std::size_t n = hamiltonians.size();
  if (n == 0) throw InvalidInput("mfg problem: at least one population required");
  if (viscosity.size() != n) throw InvalidInput("mfg problem: one viscosity per population required");
  for (const auto& h : hamiltonians) {
    if (!h) throw InvalidInput("mfg problem: missing Hamiltonian");
  }
  for (double nu : viscosity) {
    if (!(nu > 0.0) || !std::isfinite(nu)) throw InvalidInput("mfg problem: viscosities must be > 0");
  }
  if (!cost || cost->populations() != n) throw InvalidInput("mfg problem: cost model population count mismatch");
  if (initial.populations() != n) throw InvalidInput("mfg problem: one initial density per population required");
  if (!(initial.grid() == grid)) throw InvalidInput("mfg problem: initial density grid mismatch");
  validate_initial(initial, {}, grid);
  check_density_vector(initial, kInitialMassTolerance);
}

double trajectory_distance(const PopulationTrajectories& a, const PopulationTrajectories& b) {
  if (a.size() != b.size()) throw InvalidInput("trajectory_distance: population count mismatch");
  double sup = 0.0;
  const std::size_t points = a.front().size();
  for (std::size_t j = 0; j < points; ++j) {
    double sq = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double d = l2_norm(a[k][j] - b[k][j]);
      sq += d * d;
    }
    sup = std::max(sup, std::sqrt(sq));
  }
  return sup;
}

namespace {

PopulationTrajectories hjb_for(const MFGProblem& p, const PopulationTrajectories& m) {
  return solve_hjb_backward(HJBProblem{p.grid, p.time, p.viscosity, p.hamiltonians, p.cost, m});
}

PopulationTrajectories kfp_for(const MFGProblem& p, const PopulationTrajectories& v) {
  std::vector<DriftTrajectory> drift;
  drift.reserve(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) drift.push_back(drift_from_values(v[k], *p.hamiltonians[k]));
  return solve_kfp_forward(KFPProblem{p.grid, p.time, p.viscosity, std::move(drift), p.initial});
}

void check_init(const MFGProblem& p, const PopulationTrajectories& init) {
  if (init.size() != p.populations()) throw InvalidInput("picard: initial guess population count mismatch");
  for (const auto& traj : init) {
    if (!(traj.time() == p.time) || !(traj.grid() == p.grid)) {
      throw InvalidInput("picard: initial guess does not live on the problem grids");
    }
  }
  for (std::size_t j = 0; j < p.time.points(); ++j) check_density_vector(density_at(init, j), kInitialMassTolerance);
}

}  // namespace

PicardResult picard_solve(const MFGProblem& problem, const PicardOptions& options,
                          std::optional<PopulationTrajectories> init) {
  problem.validate();
  if (!(options.damping > 0.0 && options.damping <= 1.0)) throw InvalidInput("picard: damping must lie in (0,1]");
  if (!(options.tolerance > 0.0)) throw InvalidInput("picard: tolerance must be > 0");
  if (options.max_iterations == 0) throw InvalidInput("picard: max_iterations must be >= 1");

  const auto start = std::chrono::steady_clock::now();
  PopulationTrajectories m;
  if (init) {
    check_init(problem, *init);
    m = std::move(*init);
  } else {
    for (std::size_t k = 0; k < problem.populations(); ++k) m.push_back(Trajectory::constant(problem.time, problem.initial[k]));
  }

  PicardResult out;
  out.trace.damping = options.damping;
  const double theta = options.damping;
  bool converged = false;
  std::size_t it = 0;
  double residual = 0.0;
  while (it < options.max_iterations) {
    ++it;
    const auto v = hjb_for(problem, m);
    auto m_new = kfp_for(problem, v);
    residual = trajectory_distance(m_new, m);
    out.trace.residuals.push_back(residual);
    if (!std::isfinite(residual)) break;
    if (theta == 1.0) {
      m = std::move(m_new);
    } else {
      for (std::size_t k = 0; k < m.size(); ++k) {
        for (std::size_t j = 0; j < m[k].size(); ++j) {
          Field& cur = m[k][j];
          const Field& nw = m_new[k][j];
          for (std::size_t c = 0; c < cur.size(); ++c) cur[c] = (1.0 - theta) * cur[c] + theta * nw[c];
        }
      }
    }
    if (residual <= options.tolerance) {
      converged = true;
      break;
    }
  }

  out.solution.values = hjb_for(problem, m);
  out.solution.densities = std::move(m);
  out.solution.converged = converged;
  out.solution.iterations = it;
  out.solution.residual = residual;
  out.trace.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<PopulationTrajectories> multistart_initial_guesses(const MFGProblem& problem, std::size_t n_starts,
                                                               std::uint64_t seed) {
  std::vector<PopulationTrajectories> guesses;
  guesses.reserve(n_starts);
  PopulationTrajectories base;
  for (std::size_t k = 0; k < problem.populations(); ++k) base.push_back(Trajectory::constant(problem.time, problem.initial[k]));
  guesses.push_back(std::move(base));
  MeasureSampler sampler(problem.grid, problem.populations(), seed);
  while (guesses.size() < n_starts) {
    const DensityVector d = sampler.draw();
    PopulationTrajectories g;
    for (std::size_t k = 0; k < problem.populations(); ++k) g.push_back(Trajectory::constant(problem.time, d[k]));
    guesses.push_back(std::move(g));
  }
  return guesses;
}

MultistartReport multistart_probe(const MFGProblem& problem, std::size_t n_starts, const PicardOptions& options,
                                  std::uint64_t seed, std::size_t workers) {
  if (n_starts < 2) throw InvalidInput("multistart: at least two starts required");
  problem.validate();
  auto guesses = multistart_initial_guesses(problem, n_starts, seed);

  std::vector<std::optional<PicardResult>> results(n_starts);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n_starts; i = next++) {
      try {
        results[i] = picard_solve(problem, options, std::move(guesses[i]));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n_starts);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  MultistartReport rep;
  for (auto& r : results) rep.runs.push_back(std::move(*r));
  std::vector<const PicardResult*> ok;
  for (const auto& r : rep.runs) {
    if (r.solution.converged) ok.push_back(&r);
  }
  rep.converged_runs = ok.size();
  if (ok.size() >= 2) {
    double d = 0.0;
    for (std::size_t i = 0; i < ok.size(); ++i) {
      for (std::size_t j = i + 1; j < ok.size(); ++j) {
        d = std::max(d, trajectory_distance(ok[i]->solution.densities, ok[j]->solution.densities));
      }
    }
    rep.max_pairwise_distance = d;
    rep.unique_observed = d <= 10.0 * options.tolerance;
  }
  return rep;
}

}  // namespace mfg

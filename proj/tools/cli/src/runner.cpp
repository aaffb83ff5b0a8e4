#include "mfgcli/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "mfg/diagnostics.hpp"
#include "mfg/error.hpp"
#include "mfg/estimators.hpp"
#include "mfg/kfp.hpp"
#include "mfg/operators.hpp"
#include "mfg/sampler.hpp"
#include "mfgcli/io.hpp"
#include "mfgcli/mms.hpp"

#ifndef MFGKIT_VERSION
#define MFGKIT_VERSION "0.0.0"
#endif

namespace mfg::cli {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

json vec_json(const Vec2& v, int dim) { return dim == 1 ? json::array({v[0]}) : json::array({v[0], v[1]}); }

std::string snapshot_name(char quantity, std::size_t population, std::size_t step) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snapshots/%c_p%zu_s%05zu.csv", quantity, population, step);
  return buf;
}

// Writes v and m snapshots every `every` steps (and the final step).
void write_snapshots(const std::filesystem::path& root, const std::string& prefix, const MFGSolution& sol,
                     std::size_t every, json& files) {
  const TimeGrid& time = sol.densities.front().time();
  for (std::size_t k = 0; k < sol.densities.size(); ++k) {
    for (std::size_t j = 0; j < time.points(); ++j) {
      if (j % every != 0 && j != time.steps()) continue;
      for (const char q : {'m', 'v'}) {
        const Field& f = q == 'm' ? sol.densities[k][j] : sol.values[k][j];
        const std::string rel = prefix + snapshot_name(q, k + 1, j);
        write_text(root / rel, field_csv(f));
        files.push_back({{"path", rel},
                         {"quantity", q == 'm' ? "density" : "value"},
                         {"population", k + 1},
                         {"step", j},
                         {"time", time.time(j)}});
      }
    }
  }
}

json run_json(const std::string& id, const PicardResult& r) {
  double mass_defect = 0.0;
  double min_density = std::numeric_limits<double>::infinity();
  for (const auto& traj : r.solution.densities) {
    for (const auto& f : traj.frames()) {
      mass_defect = std::max(mass_defect, std::abs(integrate(f) - 1.0));
      min_density = std::min(min_density, f.min());
    }
  }
  return {{"id", id},
          {"converged", r.solution.converged},
          {"iterations", r.solution.iterations},
          {"residual", r.solution.residual},
          {"damping", r.trace.damping},
          {"wall_seconds", r.trace.wall_seconds},
          {"residuals", r.trace.residuals},
          {"max_mass_defect", mass_defect},
          {"min_density", min_density}};
}

json density_bound_json(const DensityBoundEntry& e) {
  return {{"T", e.T},
          {"M", e.M},
          {"sup_density", e.sup_density},
          {"sup_initial", e.sup_initial},
          {"sup_drift", e.sup_drift},
          {"bracket", e.bracket}};
}

json value_bound_json(const ExperimentConfig& cfg, const MFGProblem& p, const MFGSolution& sol) {
  const auto& d = p.cost->declared();
  const bool alpha_declared = std::all_of(cfg.alpha.begin(), cfg.alpha.end(), [](const auto& a) { return a.has_value(); });
  if (!d.C_F || !d.C_G || !alpha_declared) {
    return {{"checked", false}, {"reason", "C_F, C_G and every alpha must be declared"}};
  }
  double alpha = 0.0;
  for (const auto& a : cfg.alpha) alpha = std::max(alpha, *a);
  const auto c = value_bound_check(sol, *d.C_F, *d.C_G, alpha, p.time, p.grid);
  return {{"checked", true}, {"pass", c.pass},           {"observed", c.observed}, {"bound", c.bound},
          {"tol_scheme", c.tol_scheme}, {"margin", c.margin}, {"alpha", alpha}};
}

json ingredient_json(const Ingredient& g) {
  return {{"value", g.value}, {"provenance", g.provenance == Provenance::Declared ? "declared" : "empirical"}};
}

Ingredient pick(const std::optional<double>& declared, double empirical) {
  return declared ? Ingredient{*declared, Provenance::Declared} : Ingredient{empirical, Provenance::Empirical};
}

struct Diagnosis {
  json report;
  DensityBoundEntry density;
};

Diagnosis diagnose(const ExperimentConfig& cfg, const MFGProblem& p, const MFGSolution& sol, std::uint64_t seed,
                   bool full) {
  Diagnosis out;
  json& r = out.report;
  out.density = density_bound_report(sol, p.initial, p.hamiltonians);
  r["density_bound"] = density_bound_json(out.density);
  r["value_bound"] = value_bound_json(cfg, p, sol);

  std::vector<VectorField> drift0;
  for (std::size_t k = 0; k < p.populations(); ++k) drift0.push_back(drift_from_values(sol.values[k], *p.hamiltonians[k]).front());
  const auto init = validate_initial(p.initial, drift0, p.grid);
  r["initial"] = {{"mass", init.mass}, {"min", init.min_value}, {"compatibility_residual", init.compatibility_residual}};
  if (!full) return out;

  const std::vector<MFGSolution> sols{sol};
  const auto gc = gradient_range_constants(sols, p.hamiltonians, cfg.diagnostics.lattice);
  r["gradient_range"] = {{"C_H", gc.C_H},
                         {"C_bar_H", gc.C_bar_H},
                         {"pairwise_lipschitz", gc.pairwise_lipschitz},
                         {"jacobian_lipschitz", gc.jacobian_lipschitz},
                         {"box_lo", vec_json(gc.box_lo, p.grid.dim())},
                         {"box_hi", vec_json(gc.box_hi, p.grid.dim())},
                         {"note", "upper-bounded on box containing the gradient hull"}};

  const auto& d = p.cost->declared();
  std::optional<LipschitzEstimate> est;
  if ((!d.L_F || !d.L_G) && cfg.diagnostics.lipschitz_pairs > 0) {
    MeasureSampler sampler(p.grid, p.populations(), seed);
    est = estimate_lipschitz(*p.cost, sampler, cfg.diagnostics.lipschitz_pairs);
    r["lipschitz_estimate"] = {{"L_F", est->L_F}, {"L_G", est->L_G}, {"pairs", est->pairs_used}};
  }

  std::optional<double> declared_cbar = cfg.certificate.C_bar_H;
  if (!declared_cbar) {
    double lip = 0.0;
    bool all = true;
    for (const auto& h : p.hamiltonians) {
      if (const auto& l = h->metadata().dp_lipschitz) {
        lip = std::max(lip, *l);
      } else {
        all = false;
      }
    }
    if (all) declared_cbar = lip;
  }
  CertificateInputs ci;
  ci.T = p.time.horizon();
  ci.N = p.populations();
  ci.L_F = pick(d.L_F, est ? est->L_F : 0.0);
  ci.L_G = pick(d.L_G, est ? est->L_G : 0.0);
  ci.C_H = pick(cfg.certificate.C_H, gc.C_H);
  ci.C_bar_H = pick(declared_cbar, gc.C_bar_H);
  ci.M = pick(cfg.certificate.M, out.density.M);
  const auto cert = certify(ci);
  r["certificate"] = {{"psi", cert.psi},
                      {"verdict", cert.verdict},
                      {"all_declared", cert.all_declared},
                      {"ingredients",
                       {{"T", ci.T},
                        {"N", ci.N},
                        {"L_F", ingredient_json(ci.L_F)},
                        {"L_G", ingredient_json(ci.L_G)},
                        {"C_H", ingredient_json(ci.C_H)},
                        {"C_bar_H", ingredient_json(ci.C_bar_H)},
                        {"M", ingredient_json(ci.M)}}},
                      {"thresholds",
                       {{"horizon", opt(cert.horizon_threshold)},
                        {"C_bar_H", opt(cert.c_bar_h_threshold)},
                        {"lipschitz_scale", opt(cert.lipschitz_scale_threshold)}}}};

  if (cfg.diagnostics.monotonicity_pairs > 0) {
    MeasureSampler sampler(p.grid, p.populations(), seed + 1);
    const auto mono = check_monotonicity(*p.cost, sampler, cfg.diagnostics.monotonicity_pairs);
    r["monotonicity"] = {{"min_pairing", mono.min_pairing},
                         {"verdict", mono.verdict()},
                         {"samples", mono.samples},
                         {"first_violation", mono.first_violation}};
  }

  if (!cfg.diagnostics.epsilons.empty()) {
    const auto cd = continuous_dependence_probe(p, cfg.diagnostics.epsilons, cfg.solver, seed + 2);
    json rows = json::array();
    for (const auto& row : cd.rows) rows.push_back({{"epsilon", row.epsilon}, {"ratio", row.ratio}, {"converged", row.converged}});
    r["continuous_dependence"] = {
        {"rows", rows}, {"baseline_converged", cd.baseline_converged}, {"spread", opt(cd.spread)}, {"bounded", cd.bounded}};
  }
  return out;
}

std::string run_dir(const char* stem, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%02zu/", stem, i);
  return buf;
}

struct TaskContext {
  const ExperimentConfig& cfg;
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
  std::size_t every;
  std::size_t workers;
};

struct TaskResult {
  json runs = json::array();
  json diagnostics;
  json extra;
  json files = json::array();
  std::optional<DensityBoundEntry> density;
  double psi = std::numeric_limits<double>::quiet_NaN();
};

TaskResult run_single(const TaskContext& ctx, const ExperimentConfig& cfg, TaskKind kind, const std::string& prefix,
                      std::size_t workers) {
  const MFGProblem& p = *cfg.problem;
  TaskResult out;
  if (kind == TaskKind::Multistart) {
    const auto rep = multistart_probe(p, cfg.task.n_starts, cfg.solver, *ctx.seed + 3, workers);
    for (std::size_t i = 0; i < rep.runs.size(); ++i) {
      const std::string sub = prefix + run_dir("start", i);
      out.runs.push_back(run_json(sub.substr(0, sub.size() - 1), rep.runs[i]));
      write_snapshots(ctx.out, sub, rep.runs[i].solution, ctx.every, out.files);
    }
    std::string verdict;
    if (rep.unique_observed) verdict = *rep.unique_observed ? "unique fixed point observed" : "distinct fixed points observed";
    out.extra["multistart"] = {{"n_starts", cfg.task.n_starts},
                               {"converged_runs", rep.converged_runs},
                               {"max_pairwise_distance", opt(rep.max_pairwise_distance)},
                               {"tolerance", cfg.solver.tolerance},
                               {"verdict", verdict}};
    if (!rep.runs.empty()) {
      auto d = diagnose(cfg, p, rep.runs.front().solution, 0, false);
      out.diagnostics = std::move(d.report);
      out.density = std::move(d.density);
    }
    return out;
  }
  const PicardResult res = picard_solve(p, cfg.solver);
  out.runs.push_back(run_json(prefix.empty() ? "main" : prefix.substr(0, prefix.size() - 1), res));
  write_snapshots(ctx.out, prefix, res.solution, ctx.every, out.files);
  auto d = diagnose(cfg, p, res.solution, ctx.seed.value_or(0), kind == TaskKind::Diagnose);
  out.diagnostics = std::move(d.report);
  out.density = std::move(d.density);
  if (out.diagnostics.contains("certificate")) out.psi = out.diagnostics["certificate"]["psi"].get<double>();
  return out;
}

json run_sweep(const TaskContext& ctx, json& files, bool& failed) {
  const SweepSpec& sw = ctx.cfg.task.sweep;
  const std::size_t n = sw.values.size();
  std::vector<ExperimentConfig> configs;
  configs.reserve(n);
  for (double v : sw.values) configs.push_back(with_override(ctx.cfg, sw.parameter, v));

  std::vector<std::optional<TaskResult>> results(n);
  std::vector<std::string> errors(n);
  std::vector<std::optional<std::size_t>> error_steps(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        results[i] = run_single(ctx, configs[i], sw.inner, run_dir("run", i), 1);
      } catch (const SolverError& e) {
        errors[i] = e.what();
        error_steps[i] = e.step();
      }
    }
  };
  const std::size_t w = std::min(ctx.workers, n);
  if (w <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < w; ++i) pool.emplace_back(worker);
  }

  json rows = json::array();
  json psi = json::array();
  std::vector<DensityBoundEntry> entries;
  for (std::size_t i = 0; i < n; ++i) {
    json row = {{"index", i}, {"value", sw.values[i]}, {"dir", run_dir("run", i)}};
    if (!results[i]) {
      failed = true;
      row["status"] = "solver_error";
      row["error"] = {{"message", errors[i]}, {"time_step", opt(error_steps[i])}};
      psi.push_back(nullptr);
    } else {
      TaskResult& r = *results[i];
      row["status"] = "ok";
      row["runs"] = std::move(r.runs);
      row["diagnostics"] = std::move(r.diagnostics);
      if (!r.extra.is_null()) row.update(r.extra);
      for (auto& f : r.files) files.push_back(std::move(f));
      psi.push_back(std::isnan(r.psi) ? json(nullptr) : json(r.psi));
      if (r.density) entries.push_back(*r.density);
    }
    rows.push_back(std::move(row));
  }
  json fit_json = nullptr;
  if (const auto fit = fit_density_bound(entries)) {
    json flags = json::array();
    for (bool v : fit->violations) flags.push_back(v);
    fit_json = {{"C", fit->C}, {"r", fit->r}, {"violations", flags}};
  }
  return {{"parameter", sw.parameter},
          {"values", sw.values},
          {"task", task_name(sw.inner)},
          {"psi", psi},
          {"density_fit", fit_json},
          {"results", rows}};
}

json run_mms_task(const TaskContext& ctx, json& files) {
  const auto res = run_mms(ctx.cfg.task.mms);
  std::string csv = "kind,cells,steps,error,order\n";
  auto rows = [&](const char* kind, const std::vector<MmsRow>& rs) {
    json arr = json::array();
    for (const auto& r : rs) {
      csv += std::string(kind) + "," + std::to_string(r.cells) + "," + std::to_string(r.steps) + "," +
             format_double(r.error) + "," + (r.order ? format_double(*r.order) : "") + "\n";
      arr.push_back({{"cells", r.cells}, {"steps", r.steps}, {"error", r.error}, {"order", opt(r.order)}});
    }
    return arr;
  };
  json out = {{"spatial", rows("spatial", res.spatial)}, {"temporal", rows("temporal", res.temporal)}};
  write_text(ctx.out / "mms_orders.csv", csv);
  files.push_back({{"path", "mms_orders.csv"}, {"quantity", "mms_orders"}});
  return out;
}

bool needs_seed(const ExperimentConfig& cfg, TaskKind kind) {
  if (kind == TaskKind::Multistart) return true;
  if (kind == TaskKind::Diagnose) {
    return cfg.diagnostics.lipschitz_pairs > 0 || cfg.diagnostics.monotonicity_pairs > 0 ||
           !cfg.diagnostics.epsilons.empty();
  }
  if (kind == TaskKind::Sweep) return needs_seed(cfg, cfg.task.sweep.inner);
  return false;
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  const auto t0 = Clock::now();
  const TaskKind kind = opts.task.value_or(cfg.task.kind);
  if (kind == TaskKind::Sweep && cfg.task.sweep.parameter.empty()) {
    throw ConfigError("task.sweep is required to run a sweep");
  }
  if (kind != TaskKind::Mms && !cfg.problem) throw ConfigError("config describes no problem (task kind mms)");
  const std::optional<std::uint64_t> seed = opts.seed ? opts.seed : cfg.task.seed;
  if (!seed && needs_seed(cfg, kind)) {
    throw ConfigError("task '" + std::string(task_name(kind)) + "' is stochastic: set task.seed or pass --seed");
  }
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  TaskContext ctx{cfg, opts.out_dir, seed, opts.snapshot_every.value_or(cfg.snapshot_every),
                  opts.workers.value_or(cfg.workers.value_or(hw))};
  if (ctx.every == 0) throw ConfigError("--snapshot-every must be >= 1");
  if (ctx.workers == 0) ctx.workers = hw;

  RunOutcome out;
  json& m = out.manifest;
  m["schema_version"] = kManifestSchemaVersion;
  m["tool"] = std::string("mfgkit ") + MFGKIT_VERSION;
  m["name"] = cfg.name;
  m["task"] = task_name(kind);
  m["config"] = {{"text", cfg.text}, {"hash", git_blob_hash(cfg.text)}};
  m["seed"] = opt(seed);
  m["snapshot_every"] = ctx.every;
  if (cfg.problem) {
    const auto& p = *cfg.problem;
    json cells = json::array();
    json extents = json::array();
    for (int a = 0; a < p.grid.dim(); ++a) {
      cells.push_back(p.grid.cells(a));
      extents.push_back({p.grid.extent(a).lo, p.grid.extent(a).hi});
    }
    m["problem"] = {{"dim", p.grid.dim()},     {"cells", cells},           {"extents", extents},
                    {"horizon", p.time.horizon()}, {"steps", p.time.steps()}, {"populations", p.populations()},
                    {"viscosity", p.viscosity}};
    m["solver"] = {{"damping", cfg.solver.damping},
                   {"tolerance", cfg.solver.tolerance},
                   {"max_iterations", cfg.solver.max_iterations}};
  }
  json files = json::array();
  std::filesystem::create_directories(ctx.out);

  try {
    bool failed = false;
    switch (kind) {
      case TaskKind::Solve:
      case TaskKind::Diagnose:
      case TaskKind::Multistart: {
        auto r = run_single(ctx, cfg, kind, "", ctx.workers);
        m["runs"] = std::move(r.runs);
        m["diagnostics"] = std::move(r.diagnostics);
        if (!r.extra.is_null()) m.update(r.extra);
        files = std::move(r.files);
        break;
      }
      case TaskKind::Sweep:
        m["sweep"] = run_sweep(ctx, files, failed);
        break;
      case TaskKind::Mms:
        m["mms"] = run_mms_task(ctx, files);
        break;
    }
    m["status"] = failed ? "solver_error" : "ok";
    out.exit_code = failed ? kExitSolverError : kExitOk;
  } catch (const SolverError& e) {
    m["status"] = "solver_error";
    m["error"] = {{"message", e.what()}, {"time_step", opt(e.step())}};
    out.exit_code = kExitSolverError;
  }
  m["files"] = std::move(files);
  m["wall_seconds"] = seconds_since(t0);
  write_text(ctx.out / "manifest.json", m.dump(2) + "\n");
  return out;
}

}  // namespace mfg::cli

#include "mfgcli/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <numbers>
#include <set>
#include <sstream>

#include "mfg/error.hpp"
#include "mfg/kfp.hpp"
#include "mfg/operators.hpp"
#include "mfgcli/io.hpp"
#include "mfgcli/scenarios.hpp"

namespace mfg::cli {

ConfigError::ConfigError(const std::string& what, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

std::string_view task_name(TaskKind kind) noexcept {
  switch (kind) {
    case TaskKind::Solve: return "solve";
    case TaskKind::Multistart: return "multistart";
    case TaskKind::Diagnose: return "diagnose";
    case TaskKind::Sweep: return "sweep";
    case TaskKind::Mms: return "mms";
  }
  return "solve";
}

std::optional<TaskKind> parse_task_name(std::string_view name) noexcept {
  for (TaskKind k : {TaskKind::Solve, TaskKind::Multistart, TaskKind::Diagnose, TaskKind::Sweep, TaskKind::Mms}) {
    if (task_name(k) == name) return k;
  }
  return std::nullopt;
}

namespace {

using YAML::Node;

int line_of(const Node& n) {
  const auto m = n.Mark();
  return m.line >= 0 ? m.line + 1 : 0;
}


// Lookup that never inserts; the parent is kept for error lines.
struct Ref {
  Node node;
  Node parent;
  std::string where;

  bool present() const { return node.IsDefined() && !node.IsNull(); }
  int line() const { return present() ? line_of(node) : line_of(parent); }
  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(where + ": " + msg, line()); }

  Ref operator[](const std::string& key) const {
    if (present() && !node.IsMap()) fail("expected a mapping");
    const Node& cn = node;
    return Ref{present() ? cn[key] : Node(), present() ? node : parent, where.empty() ? key : where + "." + key};
  }
  Ref at(std::size_t i) const {
    const Node& cn = node;
    return Ref{cn[i], node, where + "[" + std::to_string(i) + "]"};
  }
  std::size_t size() const { return node.size(); }
  bool is_seq() const { return present() && node.IsSequence(); }
  bool is_map() const { return present() && node.IsMap(); }
  bool is_scalar() const { return present() && node.IsScalar(); }

  void require() const {
    if (!present()) fail("required");
  }

  void allow(std::initializer_list<const char*> keys) const {
    if (!present()) return;
    if (!node.IsMap()) fail("expected a mapping");
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!ok.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'", line_of(kv.first));
    }
  }

  double number() const {
    require();
    if (!node.IsScalar()) fail("expected a number");
    try {
      const double v = node.as<double>();
      if (!std::isfinite(v)) fail("must be finite");
      return v;
    } catch (const YAML::Exception&) {
      fail("expected a number, got '" + node.Scalar() + "'");
    }
  }
  double number(double fallback) const { return present() ? number() : fallback; }

  double nonneg(double fallback) const {
    const double v = number(fallback);
    if (v < 0.0) fail("must be >= 0");
    return v;
  }
  double positive() const {
    const double v = number();
    if (!(v > 0.0)) fail("must be > 0");
    return v;
  }

  std::uint64_t unsigned_int() const {
    require();
    try {
      const std::string s = node.Scalar();
      if (s.empty() || s[0] == '-') fail("expected a nonnegative integer");
      return node.as<std::uint64_t>();
    } catch (const YAML::Exception&) {
      fail("expected a nonnegative integer, got '" + node.Scalar() + "'");
    }
  }
  std::size_t count(std::size_t fallback) const {
    return present() ? static_cast<std::size_t>(unsigned_int()) : fallback;
  }

  std::string text() const {
    require();
    if (!node.IsScalar()) fail("expected a string");
    return node.Scalar();
  }
  std::string text(const std::string& fallback) const { return present() ? text() : fallback; }

  std::optional<double> optional_nonneg() const {
    if (!present()) return std::nullopt;
    return nonneg(0.0);
  }

  std::vector<double> numbers() const {
    require();
    if (!node.IsSequence()) fail("expected a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).number());
    return out;
  }
  std::vector<std::size_t> counts() const {
    require();
    if (!node.IsSequence()) fail("expected a list of integers");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(static_cast<std::size_t>(at(i).unsigned_int()));
    return out;
  }
};

template <class F>
auto guarded(const Ref& r, F&& f) {
  try {
    return f();
  } catch (const InvalidInput& e) {
    r.fail(e.what());
  }
}

Interval interval(const Ref& r) {
  const auto v = r.numbers();
  if (v.size() != 2) r.fail("expected [lo, hi]");
  if (!(v[1] > v[0])) r.fail("need hi > lo");
  return {v[0], v[1]};
}

Vec2 vec(const Ref& r) {
  if (r.is_scalar()) return {r.number(), 0.0};
  const auto v = r.numbers();
  if (v.empty() || v.size() > 2) r.fail("expected one or two components");
  return {v[0], v.size() == 2 ? v[1] : 0.0};
}

// ---------------------------------------------------------------------------
// Functions of x

ScalarFn scalar_fn(const Ref& r) {
  if (r.is_scalar()) return constant_fn(r.number());
  if (!r.is_map()) r.fail("expected a number or a function spec");
  const std::string type = r["type"].text();
  constexpr double pi = std::numbers::pi;
  if (type == "const") {
    r.allow({"type", "value"});
    return constant_fn(r["value"].number());
  }
  if (type == "cos" || type == "sin") {
    r.allow({"type", "amplitude", "frequency", "offset", "axis"});
    const double a = r["amplitude"].number(1.0);
    const double f = r["frequency"].number(1.0);
    const double c = r["offset"].number(0.0);
    const auto axis = r["axis"].count(0);
    if (axis > 1) r["axis"].fail("must be 0 or 1");
    if (type == "cos") return [=](const Vec2& x) { return c + a * std::cos(f * pi * x[axis]); };
    return [=](const Vec2& x) { return c + a * std::sin(f * pi * x[axis]); };
  }
  if (type == "linear") {
    r.allow({"type", "slope", "offset"});
    const Vec2 s = vec(r["slope"]);
    const double c = r["offset"].number(0.0);
    return [=](const Vec2& x) { return c + s[0] * x[0] + s[1] * x[1]; };
  }
  if (type == "gauss") {
    r.allow({"type", "center", "width", "amplitude", "offset"});
    const Vec2 m = vec(r["center"]);
    const double w = r["width"].positive();
    const double a = r["amplitude"].number(1.0);
    const double c = r["offset"].number(0.0);
    return [=](const Vec2& x) {
      const double d2 = (x[0] - m[0]) * (x[0] - m[0]) + (x[1] - m[1]) * (x[1] - m[1]);
      return c + a * std::exp(-d2 / (2.0 * w * w));
    };
  }
  r["type"].fail("unknown function type '" + type + "' (const, cos, sin, linear, gauss)");
}

VectorFn vector_fn(const Ref& r) {
  if (!r.present()) return constant_vector_fn({0.0, 0.0});
  if (r.is_scalar()) return constant_vector_fn({r.number(), 0.0});
  if (!r.is_seq() || r.size() == 0 || r.size() > 2) r.fail("expected a list of one or two component functions");
  const ScalarFn fx = scalar_fn(r.at(0));
  const ScalarFn fy = r.size() == 2 ? scalar_fn(r.at(1)) : constant_fn(0.0);
  return [=](const Vec2& x) { return Vec2{fx(x), fy(x)}; };
}

MatrixFn matrix_fn(const Ref& r) {
  if (!r.present()) return identity_matrix_fn();
  if (r.is_scalar()) {
    if (r.node.Scalar() == "identity") return identity_matrix_fn();
    const double s = r.number();
    return [=](const Vec2&) { return Mat2{{{s, 0.0}, {0.0, s}}}; };
  }
  if (!r.is_seq() || r.size() != 2) r.fail("expected 'identity', a scalar, or [[a, b], [c, d]]");
  const auto r0 = r.at(0).numbers();
  const auto r1 = r.at(1).numbers();
  if (r0.size() != 2 || r1.size() != 2) r.fail("expected [[a, b], [c, d]]");
  const Mat2 m{{{r0[0], r0[1]}, {r1[0], r1[1]}}};
  return [=](const Vec2&) { return m; };
}

// ---------------------------------------------------------------------------
// Models

HamiltonianPtr hamiltonian(const Ref& r, std::optional<double>& alpha_out) {
  r.require();
  const std::string type = r["type"].text();
  HamiltonianMetadata meta;
  meta.alpha = r["alpha"].optional_nonneg();
  meta.dp_lipschitz = r["dp_lipschitz"].optional_nonneg();
  const double shift = r["shift"].number(0.0);
  HamiltonianPtr h;
  if (type == "power") {
    r.allow({"type", "b", "c", "beta", "alpha", "dp_lipschitz", "shift"});
    h = guarded(r, [&] {
      return make_power_hamiltonian(scalar_fn(r["b"]), r["c"].number(1.0), r["beta"].number(2.0), meta);
    });
  } else if (type == "bellman") {
    r.allow({"type", "f", "g", "gamma", "alpha", "dp_lipschitz", "shift"});
    h = guarded(r, [&] {
      return make_bellman_hamiltonian(vector_fn(r["f"]), matrix_fn(r["g"]), r["gamma"].number(2.0), meta);
    });
  } else if (type == "robust") {
    r.allow({"type", "f", "g", "sigma", "delta", "alpha", "dp_lipschitz", "shift"});
    h = guarded(r, [&] {
      return make_robust_hamiltonian(vector_fn(r["f"]), scalar_fn(r["g"]), scalar_fn(r["sigma"]),
                                     r["delta"].number(), meta);
    });
  } else {
    r["type"].fail("unknown Hamiltonian type '" + type + "' (power, bellman, robust)");
  }
  if (shift != 0.0) h = make_shifted_hamiltonian(h, shift);
  alpha_out = h->metadata().alpha;
  return h;
}

std::vector<std::vector<double>> matrix_or_identity(const Ref& r, std::size_t rows, std::size_t cols) {
  std::vector<std::vector<double>> a(rows, std::vector<double>(cols, 0.0));
  if (!r.present()) {
    for (std::size_t i = 0; i < std::min(rows, cols); ++i) a[i][i] = 1.0;
    return a;
  }
  if (!r.is_seq() || r.size() != rows) r.fail("expected " + std::to_string(rows) + " rows");
  for (std::size_t i = 0; i < rows; ++i) {
    a[i] = r.at(i).numbers();
    if (a[i].size() != cols) r.at(i).fail("expected " + std::to_string(cols) + " entries");
  }
  return a;
}

std::vector<double> offsets(const Ref& r, std::size_t n) {
  if (!r.present()) return std::vector<double>(n, 0.0);
  auto v = r.numbers();
  if (v.size() != n) r.fail("expected one entry per population");
  return v;
}

KernelFn kernel(const Ref& r) {
  r.require();
  const std::string type = r["type"].text();
  if (type == "gauss") {
    r.allow({"type", "width", "amplitude"});
    const double w = r["width"].positive();
    const double a = r["amplitude"].number(1.0);
    return [=](const Vec2& x, const Vec2& y) {
      const double d2 = (x[0] - y[0]) * (x[0] - y[0]) + (x[1] - y[1]) * (x[1] - y[1]);
      return a * std::exp(-d2 / (2.0 * w * w));
    };
  }
  if (type == "window") {
    r.allow({"type", "radius", "ramp"});
    return guarded(r, [&] { return window_kernel(r["radius"].positive(), r["ramp"].nonneg(0.05)); });
  }
  if (type == "zero") {
    r.allow({"type"});
    return [](const Vec2&, const Vec2&) { return 0.0; };
  }
  r["type"].fail("unknown kernel type '" + type + "' (gauss, window, zero)");
}

FunctionalPtr cost_functional(const Ref& r, const Grid& grid, std::size_t n) {
  if (!r.present()) return make_zero_cost(n);
  const std::string type = r["type"].text();
  FunctionalPtr f;
  if (type == "zero") {
    r.allow({"type", "scale"});
    f = make_zero_cost(n);
  } else if (type == "fixed") {
    r.allow({"type", "fields", "scale"});
    const Ref fields = r["fields"];
    if (!fields.is_seq() || fields.size() != n) fields.fail("expected one function per population");
    std::vector<Field> fs;
    for (std::size_t k = 0; k < n; ++k) fs.push_back(Field::from_function(grid, scalar_fn(fields.at(k))));
    f = guarded(r, [&] { return make_fixed_cost(std::move(fs)); });
  } else if (type == "local") {
    r.allow({"type", "coefficients", "offset", "scale"});
    const auto a = matrix_or_identity(r["coefficients"], n, n);
    const auto c = offsets(r["offset"], n);
    f = make_local_cost(n, [=](std::size_t k, const Vec2&, std::span<const double> z) {
      double s = c[k];
      for (std::size_t j = 0; j < z.size(); ++j) s += a[k][j] * z[j];
      return s;
    });
  } else if (type == "integral") {
    r.allow({"type", "kernel", "coefficients", "offset", "scale"});
    const KernelFn kf = kernel(r["kernel"]);
    const auto a = matrix_or_identity(r["coefficients"], n, n);
    const auto c = offsets(r["offset"], n);
    f = guarded(r, [&] {
      return make_integral_cost(
          grid, n, [=](std::size_t i, std::size_t j, const Vec2& x, const Vec2& y) { return a[i][j] * kf(x, y); },
          [=](std::size_t k, const Vec2&, std::span<const double> z) { return c[k] + z[k]; });
    });
  } else if (type == "moments") {
    r.allow({"type", "moments", "coefficients", "offset", "scale"});
    const Ref ms = r["moments"];
    if (!ms.is_seq() || ms.size() == 0) ms.fail("expected a nonempty list of {population, weight}");
    std::vector<MomentSpec> specs;
    for (std::size_t q = 0; q < ms.size(); ++q) {
      const Ref m = ms.at(q);
      m.allow({"population", "weight"});
      const auto pop = m["population"].unsigned_int();
      if (pop < 1 || pop > n) m["population"].fail("population out of range 1.." + std::to_string(n));
      specs.push_back({static_cast<std::size_t>(pop - 1), scalar_fn(m["weight"])});
    }
    const auto a = matrix_or_identity(r["coefficients"], n, specs.size());
    const auto c = offsets(r["offset"], n);
    f = guarded(r, [&] {
      return make_moment_cost(n, std::move(specs), [=](std::size_t k, const Vec2&, std::span<const double> mu) {
        double s = c[k];
        for (std::size_t q = 0; q < mu.size(); ++q) s += a[k][q] * mu[q];
        return s;
      });
    });
  } else if (type == "schelling") {
    r.allow({"type", "thresholds", "eta", "epsilon", "radius", "ramp", "scale"});
    SchellingParams p;
    const Ref th = r["thresholds"];
    if (th.present()) {
      const auto v = th.numbers();
      if (v.size() != 2) th.fail("expected two thresholds");
      p.thresholds = {v[0], v[1]};
    }
    p.eta = r["eta"].number(p.eta);
    p.epsilon = r["epsilon"].number(p.epsilon);
    const Ref rad = r["radius"];
    std::array<double, 2> radius{0.1, 0.1};
    if (rad.is_seq()) {
      const auto v = rad.numbers();
      if (v.size() != 2) rad.fail("expected one radius or two");
      radius = {v[0], v[1]};
    } else if (rad.present()) {
      radius = {rad.number(), rad.number()};
    }
    const double ramp = r["ramp"].nonneg(0.05);
    f = guarded(r, [&] {
      p.windows = {window_kernel(radius[0], ramp), window_kernel(radius[1], ramp)};
      return make_schelling_cost(grid, n, p);
    });
  } else {
    r["type"].fail("unknown cost type '" + type + "' (zero, fixed, local, integral, moments, schelling)");
  }
  if (r["scale"].present()) {
    const double lambda = r["scale"].number();
    f = guarded(r["scale"], [&] { return make_scaled_cost(f, lambda); });
  }
  return f;
}

Field initial_density(const Ref& r, const Grid& grid, const std::filesystem::path& base) {
  if (!r.present()) return project_to_density(Field(grid, 1.0));
  const std::string type = r["type"].text();
  constexpr double pi = std::numbers::pi;
  if (type == "uniform") {
    r.allow({"type"});
    return project_to_density(Field(grid, 1.0));
  }
  if (type == "cosine") {
    r.allow({"type", "amplitude", "frequency", "axis"});
    const double a = r["amplitude"].number(0.5);
    const double f = r["frequency"].number(1.0);
    const auto axis = r["axis"].count(0);
    if (axis >= static_cast<std::size_t>(grid.dim())) r["axis"].fail("axis out of range");
    if (std::abs(a) > 1.0) r["amplitude"].fail("|amplitude| must be <= 1 for a nonnegative density");
    const Interval iv = grid.extent(static_cast<int>(axis));
    return project_to_density(Field::from_function(
        grid, [&](const Vec2& x) { return 1.0 + a * std::cos(f * pi * (x[axis] - iv.lo) / iv.length()); }));
  }
  if (type == "gaussian") {
    r.allow({"type", "center", "width"});
    const Vec2 m = vec(r["center"]);
    const double w = r["width"].positive();
    return project_to_density(Field::from_function(grid, [&](const Vec2& x) {
      const double d2 = (x[0] - m[0]) * (x[0] - m[0]) + (x[1] - m[1]) * (x[1] - m[1]);
      return std::exp(-d2 / (2.0 * w * w));
    }));
  }
  if (type == "file") {
    r.allow({"type", "path"});
    std::filesystem::path p = r["path"].text();
    if (p.is_relative()) p = base / p;
    Field f(grid);
    try {
      f = read_field_csv(p, grid);
    } catch (const std::exception& e) {
      r["path"].fail(e.what());
    }
    guarded(r, [&] {
      validate_initial(DensityVector({f}), {}, grid);
      return 0;
    });
    f *= 1.0 / integrate(f);
    return f;
  }
  r["type"].fail("unknown m0 type '" + type + "' (uniform, cosine, gaussian, file)");
}

MmsSpec mms_spec(const Ref& r) {
  MmsSpec s;
  if (!r.present()) return s;
  r.allow({"horizon", "viscosity", "spatial_cells", "spatial_steps", "temporal_cells", "temporal_steps",
           "reference_steps"});
  s.horizon = r["horizon"].present() ? r["horizon"].positive() : s.horizon;
  s.viscosity = r["viscosity"].present() ? r["viscosity"].positive() : s.viscosity;
  if (r["spatial_cells"].present()) s.spatial_cells = r["spatial_cells"].counts();
  s.spatial_steps = r["spatial_steps"].count(s.spatial_steps);
  s.temporal_cells = r["temporal_cells"].count(s.temporal_cells);
  if (r["temporal_steps"].present()) s.temporal_steps = r["temporal_steps"].counts();
  s.reference_steps = r["reference_steps"].count(s.reference_steps);
  if (s.spatial_cells.size() < 3) r["spatial_cells"].fail("need at least three refinements");
  if (s.temporal_steps.size() < 3) r["temporal_steps"].fail("need at least three refinements");
  for (std::size_t n : s.spatial_cells) {
    if (n < Grid::kMinCells) r["spatial_cells"].fail("cell counts must be >= 3");
  }
  if (s.temporal_cells < Grid::kMinCells) r["temporal_cells"].fail("must be >= 3");
  for (std::size_t n : s.temporal_steps) {
    if (n == 0 || n >= s.reference_steps) r["temporal_steps"].fail("steps must lie in [1, reference_steps)");
  }
  if (s.spatial_steps == 0) r["spatial_steps"].fail("must be >= 1");
  return s;
}

TaskSpec task_spec(const Ref& r) {
  TaskSpec t;
  if (!r.present()) return t;
  r.allow({"kind", "n_starts", "seed", "sweep", "mms"});
  const std::string kind = r["kind"].text("solve");
  const auto k = parse_task_name(kind);
  if (!k) r["kind"].fail("unknown task '" + kind + "' (solve, multistart, diagnose, sweep, mms)");
  t.kind = *k;
  t.n_starts = r["n_starts"].count(t.n_starts);
  if (t.n_starts < 2) r["n_starts"].fail("must be >= 2");
  if (r["seed"].present()) t.seed = r["seed"].unsigned_int();
  const Ref sw = r["sweep"];
  if (sw.present()) {
    sw.allow({"parameter", "values", "task"});
    t.sweep.parameter = sw["parameter"].text();
    t.sweep.values = sw["values"].numbers();
    if (t.sweep.values.empty()) sw["values"].fail("expected at least one value");
    const std::string inner = sw["task"].text("diagnose");
    const auto ik = parse_task_name(inner);
    if (!ik || *ik == TaskKind::Sweep || *ik == TaskKind::Mms) {
      sw["task"].fail("sweep runs solve, multistart or diagnose");
    }
    t.sweep.inner = *ik;
  } else if (t.kind == TaskKind::Sweep) {
    sw.fail("required for a sweep task");
  }
  t.mms = mms_spec(r["mms"]);
  return t;
}

std::vector<std::string> split_path(const std::string& dotted) {
  std::vector<std::string> parts;
  std::stringstream ss(dotted);
  for (std::string p; std::getline(ss, p, '.');) parts.push_back(p);
  return parts;
}

bool is_index(const std::string& s) {
  return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
}

// Walks the path; with `value` set, assigns it at the leaf.
void walk_path(Node node, const std::vector<std::string>& parts, std::size_t i, const std::string& dotted,
               const std::optional<double>& value) {
  const std::string& key = parts[i];
  Node next;
  if (node.IsSequence()) {
    if (!is_index(key) || std::stoul(key) >= node.size()) {
      throw ConfigError("sweep parameter '" + dotted + "': no element " + key, line_of(node));
    }
    next = node[std::stoul(key)];
  } else if (node.IsMap()) {
    const Node& cn = node;
    if (!cn[key].IsDefined()) throw ConfigError("sweep parameter '" + dotted + "': no key " + key, line_of(node));
    next = node[key];
  } else {
    throw ConfigError("sweep parameter '" + dotted + "': cannot descend into a scalar", line_of(node));
  }
  if (i + 1 < parts.size()) {
    walk_path(next, parts, i + 1, dotted, value);
    return;
  }
  if (!next.IsScalar()) throw ConfigError("sweep parameter '" + dotted + "' is not a scalar", line_of(next));
  if (value) {
    if (node.IsSequence()) {
      node[std::stoul(key)] = *value;
    } else {
      node[key] = *value;
    }
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  cfg.text = text;
  cfg.base_dir = base_dir;
  try {
    cfg.root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.msg, e.mark.line + 1);
  }
  const Ref root{cfg.root, cfg.root, ""};
  if (!root.is_map()) throw ConfigError("config must be a mapping", 1);
  root.allow({"name", "description", "domain", "time", "populations", "cost", "certificate", "solver", "task",
              "diagnostics", "output"});

  cfg.name = root["name"].text("experiment");
  cfg.task = task_spec(root["task"]);

  const Ref solver = root["solver"];
  solver.allow({"damping", "tolerance", "max_iterations"});
  cfg.solver.damping = solver["damping"].number(cfg.solver.damping);
  if (!(cfg.solver.damping > 0.0 && cfg.solver.damping <= 1.0)) solver["damping"].fail("must lie in (0, 1]");
  cfg.solver.tolerance = solver["tolerance"].present() ? solver["tolerance"].positive() : cfg.solver.tolerance;
  cfg.solver.max_iterations = solver["max_iterations"].count(cfg.solver.max_iterations);
  if (cfg.solver.max_iterations == 0) solver["max_iterations"].fail("must be >= 1");

  const Ref diag = root["diagnostics"];
  diag.allow({"epsilons", "lipschitz_pairs", "monotonicity_pairs", "lattice"});
  if (diag["epsilons"].present()) {
    cfg.diagnostics.epsilons = diag["epsilons"].numbers();
    for (double e : cfg.diagnostics.epsilons) {
      if (!(e > 0.0 && e <= 1.0)) diag["epsilons"].fail("each epsilon must lie in (0, 1]");
    }
  }
  cfg.diagnostics.lipschitz_pairs = diag["lipschitz_pairs"].count(cfg.diagnostics.lipschitz_pairs);
  cfg.diagnostics.monotonicity_pairs = diag["monotonicity_pairs"].count(cfg.diagnostics.monotonicity_pairs);
  cfg.diagnostics.lattice = diag["lattice"].count(cfg.diagnostics.lattice);
  if (cfg.diagnostics.lattice < 2) diag["lattice"].fail("must be >= 2");

  const Ref output = root["output"];
  output.allow({"snapshot_every", "workers"});
  cfg.snapshot_every = output["snapshot_every"].count(cfg.snapshot_every);
  if (cfg.snapshot_every == 0) output["snapshot_every"].fail("must be >= 1");
  if (output["workers"].present()) cfg.workers = output["workers"].count(0);

  if (cfg.task.kind == TaskKind::Mms) return cfg;

  const Ref domain = root["domain"];
  domain.require();
  domain.allow({"x", "nx", "y", "ny"});
  std::optional<Grid> grid;
  if (domain["y"].present() || domain["ny"].present()) {
    grid = guarded(domain, [&] {
      return Grid(interval(domain["x"]), domain["nx"].count(0), interval(domain["y"]), domain["ny"].count(0));
    });
  } else {
    grid = guarded(domain, [&] { return Grid(interval(domain["x"]), domain["nx"].count(0)); });
  }

  const Ref time = root["time"];
  time.require();
  time.allow({"horizon", "steps"});
  const double horizon = time["horizon"].number();
  if (!(horizon > 0.0)) time["horizon"].fail("horizon T must be > 0");
  const std::size_t steps = time["steps"].count(0);
  if (steps == 0) time["steps"].fail("must be >= 1");
  const TimeGrid tgrid(horizon, steps);

  const Ref pops = root["populations"];
  if (!pops.is_seq() || pops.size() == 0) pops.fail("expected a nonempty list of populations");
  const std::size_t n = pops.size();
  std::vector<double> nu;
  std::vector<HamiltonianPtr> hams;
  std::vector<Field> m0;
  cfg.alpha.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Ref p = pops.at(k);
    p.allow({"viscosity", "hamiltonian", "m0"});
    nu.push_back(p["viscosity"].positive());
    hams.push_back(hamiltonian(p["hamiltonian"], cfg.alpha[k]));
    m0.push_back(initial_density(p["m0"], *grid, base_dir));
  }

  const Ref cost = root["cost"];
  cost.allow({"running", "terminal", "declared"});
  const Ref dc = cost["declared"];
  dc.allow({"L_F", "L_G", "C_F", "C_G", "C_prime_G"});
  DeclaredConstants declared{dc["L_F"].optional_nonneg(), dc["L_G"].optional_nonneg(), dc["C_F"].optional_nonneg(),
                             dc["C_G"].optional_nonneg(), dc["C_prime_G"].optional_nonneg()};
  auto running = cost_functional(cost["running"], *grid, n);
  auto terminal = cost_functional(cost["terminal"], *grid, n);
  auto model = guarded(cost, [&] { return std::make_shared<const CostModel>(running, terminal, declared); });

  const Ref cert = root["certificate"];
  cert.allow({"C_H", "C_bar_H", "M"});
  cfg.certificate = {cert["C_H"].optional_nonneg(), cert["C_bar_H"].optional_nonneg(), cert["M"].optional_nonneg()};

  cfg.problem = MFGProblem{*grid, tgrid, nu, hams, model, DensityVector(std::move(m0))};
  guarded(pops, [&] {
    cfg.problem->validate();
    return 0;
  });

  if (cfg.task.kind == TaskKind::Sweep) walk_path(cfg.root, split_path(cfg.task.sweep.parameter), 0,
                                                  cfg.task.sweep.parameter, std::nullopt);
  return cfg;
}

ExperimentConfig load_config(const std::string& arg) {
  const std::filesystem::path p(arg);
  std::error_code ec;
  if (std::filesystem::is_regular_file(p, ec)) {
    std::string text;
    try {
      text = read_text(p);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    return parse_config(text, p.parent_path());
  }
  if (const auto* s = find_scenario(arg)) return parse_config(std::string(s->yaml), std::filesystem::current_path());
  throw ConfigError("'" + arg + "' is neither a config file nor a bundled scenario (see `scenarios list`)");
}

ExperimentConfig with_override(const ExperimentConfig& config, const std::string& dotted_path, double value) {
  Node copy = YAML::Clone(config.root);
  walk_path(copy, split_path(dotted_path), 0, dotted_path, value);
  YAML::Emitter em;
  em << copy;
  return parse_config(std::string(em.c_str()) + "\n", config.base_dir);
}

}  // namespace mfg::cli

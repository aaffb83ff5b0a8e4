#include "mfg/cost.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfg/error.hpp"
#include "mfg/operators.hpp"

namespace mfg {

CostModel::CostModel(FunctionalPtr running, FunctionalPtr terminal, DeclaredConstants declared)
    : running_(std::move(running)), terminal_(std::move(terminal)), declared_(declared) {
  if (!running_ || !terminal_) throw InvalidInput("cost model: running and terminal costs are required");
  if (running_->populations() != terminal_->populations()) {
    throw InvalidInput("cost model: running and terminal costs disagree on the population count");
  }
  for (auto c : {declared_.L_F, declared_.L_G, declared_.C_F, declared_.C_G, declared_.C_prime_G}) {
    if (c && !(*c >= 0.0)) throw InvalidInput("cost model: declared constants must be nonnegative");
  }
}

namespace {

void check_populations(const DensityVector& m, std::size_t n, std::string_view who) {
  if (m.populations() != n) {
    throw InvalidInput(std::string(who) + ": expected " + std::to_string(n) + " densities, got " +
                       std::to_string(m.populations()));
  }
}

/// Dense kernel sampled at cell centers, pre-multiplied by the cell volume.
class SampledKernel {
 public:
  SampledKernel(const Grid& grid, const KernelFn& k) : grid_(grid), n_(grid.size()), w_(n_ * n_) {
    const double vol = grid.cell_volume();
    for (std::size_t a = 0; a < n_; ++a) {
      const Vec2 x = grid.center(a);
      for (std::size_t b = 0; b < n_; ++b) {
        const double v = k(x, grid.center(b));
        if (!std::isfinite(v)) {
          throw InvalidInput("kernel returned a non-finite value at cell pair (" + std::to_string(a) +
                             ", " + std::to_string(b) + ")");
        }
        w_[a * n_ + b] = v * vol;
      }
    }
  }

  void apply_add(const Field& m, double scale, Field& out) const {
    for (std::size_t a = 0; a < n_; ++a) {
      const double* row = &w_[a * n_];
      double acc = 0.0;
      for (std::size_t b = 0; b < n_; ++b) acc += row[b] * m[b];
      out[a] += scale * acc;
    }
  }

  const Grid& grid() const noexcept { return grid_; }

 private:
  Grid grid_;
  std::size_t n_;
  std::vector<double> w_;
};

class ZeroCost final : public DensityFunctional {
 public:
  explicit ZeroCost(std::size_t n) : n_(n) {}
  std::size_t populations() const noexcept override { return n_; }
  std::vector<Field> evaluate(const DensityVector& m) const override {
    check_populations(m, n_, "zero cost");
    return std::vector<Field>(n_, Field(m.grid()));
  }
  bool depends_on_density() const noexcept override { return false; }
  std::string_view kind() const noexcept override { return "zero"; }

 private:
  std::size_t n_;
};

class FixedCost final : public DensityFunctional {
 public:
  explicit FixedCost(std::vector<Field> fields) : fields_(std::move(fields)) {
    if (fields_.empty()) throw InvalidInput("fixed cost: at least one field required");
    for (const auto& f : fields_) {
      if (!f.all_finite()) throw InvalidInput("fixed cost: non-finite values");
    }
  }
  std::size_t populations() const noexcept override { return fields_.size(); }
  std::vector<Field> evaluate(const DensityVector& m) const override {
    check_populations(m, fields_.size(), "fixed cost");
    if (!(m.grid() == fields_.front().grid())) throw InvalidInput("fixed cost: grid mismatch");
    return fields_;
  }
  bool depends_on_density() const noexcept override { return false; }
  std::string_view kind() const noexcept override { return "fixed"; }

 private:
  std::vector<Field> fields_;
};

class IntegralCost final : public DensityFunctional {
 public:
  IntegralCost(const Grid& grid, std::size_t n, const MatrixKernelFn& kernel, CompositionFn outer)
      : grid_(grid), n_(n), outer_(std::move(outer)) {
    if (n == 0) throw InvalidInput("integral cost: at least one population required");
    if (!kernel || !outer_) throw InvalidInput("integral cost: kernel and outer function are required");
    blocks_.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        blocks_.emplace_back(grid, [&kernel, i, j](const Vec2& x, const Vec2& y) { return kernel(i, j, x, y); });
      }
    }
  }

  std::size_t populations() const noexcept override { return n_; }

  std::vector<Field> evaluate(const DensityVector& m) const override {
    check_populations(m, n_, "integral cost");
    if (!(m.grid() == grid_)) throw InvalidInput("integral cost: grid mismatch");
    std::vector<Field> z(n_, Field(grid_));
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) blocks_[i * n_ + j].apply_add(m[j], 1.0, z[i]);
    }
    std::vector<Field> out(n_, Field(grid_));
    std::vector<double> zc(n_);
    for (std::size_t c = 0; c < grid_.size(); ++c) {
      for (std::size_t i = 0; i < n_; ++i) zc[i] = z[i][c];
      const Vec2 x = grid_.center(c);
      for (std::size_t k = 0; k < n_; ++k) out[k][c] = outer_(k, x, zc);
    }
    return out;
  }

  std::string_view kind() const noexcept override { return "integral"; }

 private:
  Grid grid_;
  std::size_t n_;
  CompositionFn outer_;
  std::vector<SampledKernel> blocks_;
};

class LocalCost final : public DensityFunctional {
 public:
  LocalCost(std::size_t n, CompositionFn local) : n_(n), local_(std::move(local)) {
    if (n == 0 || !local_) throw InvalidInput("local cost: populations and local function are required");
  }

  std::size_t populations() const noexcept override { return n_; }

  std::vector<Field> evaluate(const DensityVector& m) const override {
    check_populations(m, n_, "local cost");
    const Grid& g = m.grid();
    std::vector<Field> out(n_, Field(g));
    std::vector<double> s(n_);
    for (std::size_t c = 0; c < g.size(); ++c) {
      for (std::size_t i = 0; i < n_; ++i) s[i] = m[i][c];
      const Vec2 x = g.center(c);
      for (std::size_t k = 0; k < n_; ++k) out[k][c] = local_(k, x, s);
    }
    return out;
  }

  std::string_view kind() const noexcept override { return "local"; }

 private:
  std::size_t n_;
  CompositionFn local_;
};

class MomentCost final : public DensityFunctional {
 public:
  MomentCost(std::size_t n, std::vector<MomentSpec> moments, CompositionFn compose)
      : n_(n), moments_(std::move(moments)), compose_(std::move(compose)) {
    if (n == 0 || !compose_) throw InvalidInput("moment cost: populations and composition are required");
    for (const auto& mo : moments_) {
      if (mo.population >= n) throw InvalidInput("moment cost: moment refers to a missing population");
      if (!mo.weight) throw InvalidInput("moment cost: moment weight function is required");
    }
  }

  std::size_t populations() const noexcept override { return n_; }

  std::vector<Field> evaluate(const DensityVector& m) const override {
    check_populations(m, n_, "moment cost");
    const Grid& g = m.grid();
    std::vector<double> mu(moments_.size());
    for (std::size_t q = 0; q < moments_.size(); ++q) {
      const Field w = Field::from_function(g, moments_[q].weight);
      double acc = 0.0;
      const Field& dens = m[moments_[q].population];
      for (std::size_t c = 0; c < g.size(); ++c) acc += w[c] * dens[c];
      mu[q] = acc * g.cell_volume();
    }
    std::vector<Field> out(n_, Field(g));
    for (std::size_t c = 0; c < g.size(); ++c) {
      const Vec2 x = g.center(c);
      for (std::size_t k = 0; k < n_; ++k) out[k][c] = compose_(k, x, mu);
    }
    return out;
  }

  std::string_view kind() const noexcept override { return "moments"; }

 private:
  std::size_t n_;
  std::vector<MomentSpec> moments_;
  CompositionFn compose_;
};

class SchellingCost final : public DensityFunctional {
 public:
  SchellingCost(const Grid& grid, SchellingParams p)
      : params_(std::move(p)),
        windows_{SampledKernel(grid, require(params_.windows[0])), SampledKernel(grid, require(params_.windows[1]))} {
    if (!(params_.eta > 0.0)) throw InvalidInput("Schelling cost: eta must be > 0");
    if (!(params_.epsilon >= 0.0)) throw InvalidInput("Schelling cost: epsilon must be >= 0");
    for (double a : params_.thresholds) {
      if (!(a >= 0.0 && a < 1.0)) throw InvalidInput("Schelling cost: thresholds must lie in [0,1)");
    }
  }

  std::size_t populations() const noexcept override { return 2; }

  std::vector<Field> neighborhood(const DensityVector& m) const {
    check_populations(m, 2, "Schelling cost");
    if (!(m.grid() == windows_[0].grid())) throw InvalidInput("Schelling cost: grid mismatch");
    std::vector<Field> nk(2, Field(m.grid()));
    for (std::size_t k = 0; k < 2; ++k) windows_[k].apply_add(m[k], 1.0, nk[k]);
    return nk;
  }

  std::vector<Field> evaluate(const DensityVector& m) const override {
    const auto nk = neighborhood(m);
    std::vector<Field> out(2, Field(m.grid()));
    for (std::size_t c = 0; c < m.grid().size(); ++c) {
      for (std::size_t k = 0; k < 2; ++k) {
        const double own = nk[k][c];
        const double other = nk[1 - k][c];
        const double ratio = own / (own + other + params_.eta);
        out[k][c] = smoothed_negative_part(ratio - params_.thresholds[k], params_.epsilon);
      }
    }
    return out;
  }

  std::string_view kind() const noexcept override { return "schelling"; }

 private:
  static const KernelFn& require(const KernelFn& k) {
    if (!k) throw InvalidInput("Schelling cost: both window kernels are required");
    return k;
  }

  SchellingParams params_;
  std::array<SampledKernel, 2> windows_;
};

class ScaledCost final : public DensityFunctional {
 public:
  ScaledCost(FunctionalPtr base, double lambda) : base_(std::move(base)), lambda_(lambda) {
    if (!base_) throw InvalidInput("scaled cost: base is required");
  }
  std::size_t populations() const noexcept override { return base_->populations(); }
  std::vector<Field> evaluate(const DensityVector& m) const override {
    auto out = base_->evaluate(m);
    for (auto& f : out) f *= lambda_;
    return out;
  }
  bool depends_on_density() const noexcept override { return base_->depends_on_density(); }
  std::string_view kind() const noexcept override { return "scaled"; }

 private:
  FunctionalPtr base_;
  double lambda_;
};

double smootherstep(double t) noexcept {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

}  // namespace

FunctionalPtr make_zero_cost(std::size_t populations) {
  if (populations == 0) throw InvalidInput("zero cost: at least one population required");
  return std::make_shared<ZeroCost>(populations);
}

FunctionalPtr make_fixed_cost(std::vector<Field> fields) { return std::make_shared<FixedCost>(std::move(fields)); }

FunctionalPtr make_integral_cost(const Grid& grid, std::size_t populations, MatrixKernelFn kernel,
                                 CompositionFn outer) {
  return std::make_shared<IntegralCost>(grid, populations, kernel, std::move(outer));
}

FunctionalPtr make_local_cost(std::size_t populations, CompositionFn local) {
  return std::make_shared<LocalCost>(populations, std::move(local));
}

FunctionalPtr make_moment_cost(std::size_t populations, std::vector<MomentSpec> moments, CompositionFn compose) {
  return std::make_shared<MomentCost>(populations, std::move(moments), std::move(compose));
}

double smoothed_negative_part(double r, double eps) noexcept {
  if (eps == 0.0) return r < 0.0 ? -r : 0.0;
  const double s = std::hypot(r, eps);
  // For r > 0 the difference s - r cancels; use eps^2 / (s + r) instead.
  return r > 0.0 ? 0.5 * eps * eps / (s + r) : 0.5 * (s - r);
}

KernelFn window_kernel(double radius, double ramp) {
  if (!(radius >= 0.0) || !(ramp > 0.0)) throw InvalidInput("window kernel: radius >= 0 and ramp > 0 required");
  return [radius, ramp](const Vec2& x, const Vec2& y) {
    const double d = norm(Vec2{x[0] - y[0], x[1] - y[1]});
    return 1.0 - smootherstep((d - radius) / ramp);
  };
}

FunctionalPtr make_schelling_cost(const Grid& grid, std::size_t populations, SchellingParams params) {
  if (populations != 2) throw InvalidInput("Schelling cost: exactly two populations are required");
  return std::make_shared<SchellingCost>(grid, std::move(params));
}

std::vector<Field> schelling_neighborhood_mass(const DensityFunctional& schelling, const DensityVector& m) {
  const auto* s = dynamic_cast<const SchellingCost*>(&schelling);
  if (s == nullptr) throw InvalidInput("schelling_neighborhood_mass: not a Schelling cost");
  return s->neighborhood(m);
}

FunctionalPtr make_scaled_cost(FunctionalPtr base, double lambda) {
  return std::make_shared<ScaledCost>(std::move(base), lambda);
}

}  // namespace mfg

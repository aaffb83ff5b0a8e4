#include "mfg/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "mfg/error.hpp"

namespace mfg {

ScalarFn constant_fn(double c) {
  return [c](const Vec2&) { return c; };
}

VectorFn constant_vector_fn(Vec2 v) {
  return [v](const Vec2&) { return v; };
}

MatrixFn identity_matrix_fn() {
  return [](const Vec2&) { return Mat2{{{1.0, 0.0}, {0.0, 1.0}}}; };
}

namespace {

class PowerHamiltonian final : public Hamiltonian {
 public:
  PowerHamiltonian(ScalarFn b, double c, double beta, HamiltonianMetadata meta)
      : Hamiltonian(meta), b_(std::move(b)), c_(c), beta_(beta) {}

  double value(const Vec2& x, const Vec2& p) const override {
    return b_(x) * std::pow(c_ + dot(p, p), 0.5 * beta_);
  }

  Vec2 dp(const Vec2& x, const Vec2& p) const override {
    const double s = c_ + dot(p, p);
    // beta == 2 is the only admissible exponent at s == 0 (c == 0).
    const double w = beta_ == 2.0 ? 2.0 : beta_ * std::pow(s, 0.5 * beta_ - 1.0);
    const double bw = b_(x) * w;
    return {bw * p[0], bw * p[1]};
  }

  std::string_view kind() const noexcept override { return "power"; }

 private:
  ScalarFn b_;
  double c_;
  double beta_;
};

class BellmanHamiltonian final : public Hamiltonian {
 public:
  BellmanHamiltonian(VectorFn f, MatrixFn g, double gamma, HamiltonianMetadata meta)
      : Hamiltonian(meta),
        f_(std::move(f)),
        g_(std::move(g)),
        gamma_(gamma),
        conj_exp_(gamma / (gamma - 1.0)) {}

  double value(const Vec2& x, const Vec2& p) const override {
    const Vec2 q = gt_p(x, p);
    return -dot(f_(x), p) + (gamma_ - 1.0) / gamma_ * std::pow(norm(q), conj_exp_);
  }

  // d/dp of (gamma-1)/gamma |q|^s with q = g^T p is g (|q|^(s-2) q) since
  // (gamma-1)/gamma * s = 1; s >= 2 keeps this continuous at q = 0.
  Vec2 dp(const Vec2& x, const Vec2& p) const override {
    const Mat2 g = g_(x);
    const Vec2 q = transpose_apply(g, p);
    const double nq = norm(q);
    const double w = conj_exp_ == 2.0 ? 1.0 : (nq == 0.0 ? 0.0 : std::pow(nq, conj_exp_ - 2.0));
    const Vec2 f = f_(x);
    return {-f[0] + w * (g[0][0] * q[0] + g[0][1] * q[1]),
            -f[1] + w * (g[1][0] * q[0] + g[1][1] * q[1])};
  }

  std::string_view kind() const noexcept override { return "bellman"; }

 private:
  static Vec2 transpose_apply(const Mat2& g, const Vec2& p) {
    return {g[0][0] * p[0] + g[1][0] * p[1], g[0][1] * p[0] + g[1][1] * p[1]};
  }
  Vec2 gt_p(const Vec2& x, const Vec2& p) const { return transpose_apply(g_(x), p); }

  VectorFn f_;
  MatrixFn g_;
  double gamma_;
  double conj_exp_;
};

class RobustHamiltonian final : public Hamiltonian {
 public:
  RobustHamiltonian(VectorFn f, ScalarFn g, ScalarFn sigma, double delta, HamiltonianMetadata meta)
      : Hamiltonian(meta), f_(std::move(f)), g_(std::move(g)), sigma_(std::move(sigma)), delta_(delta) {}

  double value(const Vec2& x, const Vec2& p) const override {
    return -dot(f_(x), p) + 0.5 * curvature(x) * dot(p, p);
  }

  Vec2 dp(const Vec2& x, const Vec2& p) const override {
    const Vec2 f = f_(x);
    const double k = curvature(x);
    return {-f[0] + k * p[0], -f[1] + k * p[1]};
  }

  std::string_view kind() const noexcept override { return "robust"; }

 private:
  double curvature(const Vec2& x) const {
    const double g = g_(x);
    const double s = sigma_(x);
    return g * g - s * s / delta_;
  }

  VectorFn f_;
  ScalarFn g_;
  ScalarFn sigma_;
  double delta_;
};

class ShiftedHamiltonian final : public Hamiltonian {
 public:
  ShiftedHamiltonian(HamiltonianPtr base, double shift, HamiltonianMetadata meta)
      : Hamiltonian(meta), base_(std::move(base)), shift_(shift) {}

  double value(const Vec2& x, const Vec2& p) const override { return base_->value(x, p) + shift_; }
  Vec2 dp(const Vec2& x, const Vec2& p) const override { return base_->dp(x, p); }
  std::string_view kind() const noexcept override { return "shifted"; }

 private:
  HamiltonianPtr base_;
  double shift_;
};

}  // namespace

HamiltonianPtr make_power_hamiltonian(ScalarFn b, double c, double beta, HamiltonianMetadata meta) {
  if (!b) throw InvalidInput("power Hamiltonian: b(x) is required");
  if (!(c >= 0.0) || !std::isfinite(c)) throw InvalidInput("power Hamiltonian: c must be >= 0");
  if (!(beta > 0.0 && beta <= 2.0)) throw InvalidInput("power Hamiltonian: beta must lie in (0,2]");
  if (c == 0.0 && beta < 2.0) {
    throw InvalidInput("power Hamiltonian: c = 0 requires beta >= 2 (D_pH is not Lipschitz at p = 0)");
  }
  return std::make_shared<PowerHamiltonian>(std::move(b), c, beta, meta);
}

HamiltonianPtr make_bellman_hamiltonian(VectorFn f, MatrixFn g, double gamma, HamiltonianMetadata meta) {
  if (!f || !g) throw InvalidInput("Bellman Hamiltonian: f(x) and g(x) are required");
  if (!(gamma > 1.0 && gamma <= 2.0)) throw InvalidInput("Bellman Hamiltonian: gamma must lie in (1,2]");
  return std::make_shared<BellmanHamiltonian>(std::move(f), std::move(g), gamma, meta);
}

HamiltonianPtr make_robust_hamiltonian(VectorFn f, ScalarFn g, ScalarFn sigma, double delta,
                                       HamiltonianMetadata meta) {
  if (!f || !g || !sigma) throw InvalidInput("robust Hamiltonian: f, g and sigma are required");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidInput("robust Hamiltonian: delta must be > 0");
  return std::make_shared<RobustHamiltonian>(std::move(f), std::move(g), std::move(sigma), delta, meta);
}

HamiltonianPtr make_shifted_hamiltonian(HamiltonianPtr base, double shift) {
  if (!base) throw InvalidInput("shifted Hamiltonian: base is required");
  HamiltonianMetadata meta = base->metadata();
  if (meta.alpha) *meta.alpha += std::abs(shift);
  return std::make_shared<ShiftedHamiltonian>(std::move(base), shift, meta);
}

double dp_consistency_error(const Hamiltonian& h, std::span<const Vec2> xs, std::span<const Vec2> ps,
                            double step) {
  double worst = 0.0;
  for (const Vec2& x : xs) {
    for (const Vec2& p : ps) {
      const Vec2 d = h.dp(x, p);
      for (int i = 0; i < 2; ++i) {
        Vec2 up = p;
        Vec2 dn = p;
        up[i] += step;
        dn[i] -= step;
        const double fd = (h.value(x, up) - h.value(x, dn)) / (2.0 * step);
        worst = std::max(worst, std::abs(fd - d[i]));
      }
    }
  }
  return worst;
}

namespace {

double growth_ratio(const Hamiltonian& h, const Vec2& x, const Vec2& p) {
  const double np = norm(p);
  const double denom = 1.0 + np * np;
  const double r1 = std::abs(h.value(x, p)) / denom;
  const double r2 = norm(h.dp(x, p)) * (1.0 + np) / denom;
  return std::max(r1, r2);
}

}  // namespace

bool satisfies_growth(const Hamiltonian& h, double alpha, std::span<const Vec2> xs,
                      std::span<const Vec2> ps) {
  for (const Vec2& x : xs) {
    for (const Vec2& p : ps) {
      if (growth_ratio(h, x, p) > alpha * (1.0 + 1e-12)) return false;
    }
  }
  return true;
}

double estimate_growth_constant(const Hamiltonian& h, std::span<const Vec2> xs,
                                std::span<const Vec2> ps) {
  double a = 0.0;
  for (const Vec2& x : xs) {
    for (const Vec2& p : ps) a = std::max(a, growth_ratio(h, x, p));
  }
  return a;
}

}  // namespace mfg

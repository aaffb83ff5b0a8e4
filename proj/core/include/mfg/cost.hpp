#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mfg/field.hpp"

namespace mfg {

/// Maps a density vector to one field per population: F(., m) or G(., m).
class DensityFunctional {
 public:
  virtual ~DensityFunctional() = default;

  virtual std::size_t populations() const noexcept = 0;
  virtual std::vector<Field> evaluate(const DensityVector& m) const = 0;
  virtual bool depends_on_density() const noexcept { return true; }
  virtual std::string_view kind() const noexcept = 0;
};

using FunctionalPtr = std::shared_ptr<const DensityFunctional>;

/// Analytic constants a user may declare for a cost; anything left empty is
/// estimated (and labelled empirical) downstream.
struct DeclaredConstants {
  std::optional<double> L_F;
  std::optional<double> L_G;
  std::optional<double> C_F;
  std::optional<double> C_G;
  std::optional<double> C_prime_G;
};

/// Running cost F and terminal cost G for N populations.
class CostModel {
 public:
  CostModel(FunctionalPtr running, FunctionalPtr terminal, DeclaredConstants declared = {});

  std::size_t populations() const noexcept { return running_->populations(); }
  std::vector<Field> running(const DensityVector& m) const { return running_->evaluate(m); }
  std::vector<Field> terminal(const DensityVector& m) const { return terminal_->evaluate(m); }

  const DensityFunctional& running_functional() const noexcept { return *running_; }
  const DensityFunctional& terminal_functional() const noexcept { return *terminal_; }
  const DeclaredConstants& declared() const noexcept { return declared_; }

  /// Neither F nor G depends on m: the MFG system decouples.
  bool decoupled() const noexcept {
    return !running_->depends_on_density() && !terminal_->depends_on_density();
  }

 private:
  FunctionalPtr running_;
  FunctionalPtr terminal_;
  DeclaredConstants declared_;
};

using CostModelPtr = std::shared_ptr<const CostModel>;

using KernelFn = std::function<double(const Vec2& x, const Vec2& y)>;
/// Matrix-valued kernel component K_ij(x,y).
using MatrixKernelFn = std::function<double(std::size_t i, std::size_t j, const Vec2& x, const Vec2& y)>;
/// Composition g(k, x, z) for population k at point x, given a vector z.
using CompositionFn = std::function<double(std::size_t k, const Vec2& x, std::span<const double> z)>;

FunctionalPtr make_zero_cost(std::size_t populations);

/// m-independent cost: one fixed field per population.
FunctionalPtr make_fixed_cost(std::vector<Field> fields);

/// F_k(x, m) = outer(k, x, z(x)),  z_i(x) = sum_j int K_ij(x,y) m_j(y) dy.
/// The kernel is sampled once on `grid`; a non-finite sample is rejected.
FunctionalPtr make_integral_cost(const Grid& grid, std::size_t populations, MatrixKernelFn kernel,
                                 CompositionFn outer);

/// F_k(x, m) = local(k, x, (m_1(x), ..., m_N(x))).
FunctionalPtr make_local_cost(std::size_t populations, CompositionFn local);

struct MomentSpec {
  std::size_t population;
  std::function<double(const Vec2&)> weight;
};

/// F_k(x, m) = compose(k, x, mu), mu_q = int weight_q(y) m_{pop_q}(y) dy.
FunctionalPtr make_moment_cost(std::size_t populations, std::vector<MomentSpec> moments,
                               CompositionFn compose);

/// Negative part of r, smoothed as (sqrt(r^2+eps^2) - r)/2 when eps > 0.
double smoothed_negative_part(double r, double eps) noexcept;

/// Lipschitz window: 1 for |x-y| <= radius, C^2 quintic ramp to 0 at radius + ramp.
KernelFn window_kernel(double radius, double ramp);

struct SchellingParams {
  std::array<KernelFn, 2> windows;
  std::array<double, 2> thresholds{0.4, 0.4};
  double eta = 1e-3;
  double epsilon = 0.05;
};

/// Two-population segregation cost
/// F_k = phi_eps(N_k / (N_k + N_{3-k} + eta) - a_k),  N_k(x) = int K_k(x,y) m_k(y) dy.
FunctionalPtr make_schelling_cost(const Grid& grid, std::size_t populations, SchellingParams params);

/// Neighbourhood masses N_k(x, m_k) used by the Schelling cost.
std::vector<Field> schelling_neighborhood_mass(const DensityFunctional& schelling, const DensityVector& m);

/// lambda * base.
FunctionalPtr make_scaled_cost(FunctionalPtr base, double lambda);

}  // namespace mfg

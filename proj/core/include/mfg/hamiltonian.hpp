#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string_view>

#include "mfg/grid.hpp"

namespace mfg {

using ScalarFn = std::function<double(const Vec2&)>;
using VectorFn = std::function<Vec2(const Vec2&)>;
using MatrixFn = std::function<Mat2(const Vec2&)>;

ScalarFn constant_fn(double c);
VectorFn constant_vector_fn(Vec2 v);
MatrixFn identity_matrix_fn();

struct HamiltonianMetadata {
  /// Quadratic growth constant: |H| <= alpha (1+|p|^2) and
  /// |D_pH| (1+|p|) <= alpha (1+|p|^2).
  std::optional<double> alpha;
  /// Global Lipschitz constant of D_pH in p, when one exists.
  std::optional<double> dp_lipschitz;
};

class Hamiltonian {
 public:
  virtual ~Hamiltonian() = default;

  virtual double value(const Vec2& x, const Vec2& p) const = 0;
  virtual Vec2 dp(const Vec2& x, const Vec2& p) const = 0;
  virtual std::string_view kind() const noexcept = 0;

  const HamiltonianMetadata& metadata() const noexcept { return meta_; }

 protected:
  explicit Hamiltonian(HamiltonianMetadata meta) : meta_(meta) {}

 private:
  HamiltonianMetadata meta_;
};

using HamiltonianPtr = std::shared_ptr<const Hamiltonian>;

/// H(x,p) = b(x) (c + |p|^2)^(beta/2), beta in (0,2]; c = 0 needs beta = 2.
HamiltonianPtr make_power_hamiltonian(ScalarFn b, double c, double beta,
                                      HamiltonianMetadata meta = {});

/// Bellman type with running cost |a|^gamma / gamma:
/// H(x,p) = -f(x).p + (gamma-1)/gamma |g(x)^T p|^(gamma/(gamma-1)), gamma in (1,2].
HamiltonianPtr make_bellman_hamiltonian(VectorFn f, MatrixFn g, double gamma,
                                        HamiltonianMetadata meta = {});

/// Robust control (scalar g, sigma):
/// H(x,p) = -f(x).p + g(x)^2 |p|^2 / 2 - sigma(x)^2 |p|^2 / (2 delta), delta > 0.
HamiltonianPtr make_robust_hamiltonian(VectorFn f, ScalarFn g, ScalarFn sigma, double delta,
                                       HamiltonianMetadata meta = {});

/// H + c. Declared alpha (if any) grows by |c|.
HamiltonianPtr make_shifted_hamiltonian(HamiltonianPtr base, double shift);

/// Largest directional central-difference mismatch
/// |(H(x,p+h e_i) - H(x,p-h e_i)) / 2h - D_pH(x,p)_i| over the samples.
double dp_consistency_error(const Hamiltonian& h, std::span<const Vec2> xs,
                            std::span<const Vec2> ps, double step = 1e-4);

/// True iff both growth inequalities hold at every sample pair.
bool satisfies_growth(const Hamiltonian& h, double alpha, std::span<const Vec2> xs,
                      std::span<const Vec2> ps);

/// Smallest alpha that satisfies both growth inequalities on the samples
/// (an empirical lower bound on the true constant).
double estimate_growth_constant(const Hamiltonian& h, std::span<const Vec2> xs,
                                std::span<const Vec2> ps);

}  // namespace mfg

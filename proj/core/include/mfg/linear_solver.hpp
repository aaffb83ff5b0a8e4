#pragma once

#include <memory>
#include <span>

#include "mfg/operators.hpp"

namespace mfg {

/// Relative residual every linear solve must reach.
inline constexpr double kLinearSolveTolerance = 1e-12;

/// Factorizes once, solves many right-hand sides. Each solve performs one
/// step of iterative refinement and then checks
/// ||A x - b||_inf <= kLinearSolveTolerance * max(1, ||b||_inf),
/// throwing SolverError otherwise.
class LinearSolver {
 public:
  enum class Kind { SymmetricPositiveDefinite, General };

  LinearSolver(SparseMatrix matrix, Kind kind);
  ~LinearSolver();
  LinearSolver(LinearSolver&&) noexcept;
  LinearSolver& operator=(LinearSolver&&) noexcept;

  void solve(std::span<const double> rhs, std::span<double> out) const;

  const SparseMatrix& matrix() const noexcept { return matrix_; }

 private:
  struct Impl;
  SparseMatrix matrix_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mfg

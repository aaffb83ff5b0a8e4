#include "mfg/linear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <variant>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "mfg/error.hpp"

namespace mfg {

struct LinearSolver::Impl {
  using Ldlt = Eigen::SimplicialLDLT<SparseMatrix>;
  using Lu = Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>;
  std::variant<std::unique_ptr<Ldlt>, std::unique_ptr<Lu>> factor;

  Eigen::VectorXd apply(const Eigen::VectorXd& b) const {
    return std::visit([&](const auto& f) -> Eigen::VectorXd { return f->solve(b); }, factor);
  }
};

LinearSolver::LinearSolver(SparseMatrix matrix, Kind kind)
    : matrix_(std::move(matrix)), impl_(std::make_unique<Impl>()) {
  matrix_.makeCompressed();
  if (kind == Kind::SymmetricPositiveDefinite) {
    auto f = std::make_unique<Impl::Ldlt>(matrix_);
    if (f->info() != Eigen::Success) throw SolverError("LDLT factorization failed");
    impl_->factor = std::move(f);
  } else {
    auto f = std::make_unique<Impl::Lu>();
    f->analyzePattern(matrix_);
    f->factorize(matrix_);
    if (f->info() != Eigen::Success) throw SolverError("LU factorization failed: " + f->lastErrorMessage());
    impl_->factor = std::move(f);
  }
}

LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

void LinearSolver::solve(std::span<const double> rhs, std::span<double> out) const {
  const auto n = matrix_.rows();
  if (static_cast<Eigen::Index>(rhs.size()) != n || static_cast<Eigen::Index>(out.size()) != n) {
    throw InvalidInput("linear solve: dimension mismatch");
  }
  const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), n);
  Eigen::VectorXd x = impl_->apply(b);
  Eigen::VectorXd r = b - matrix_ * x;
  x += impl_->apply(r);
  r = b - matrix_ * x;

  const double scale = std::max(1.0, b.lpNorm<Eigen::Infinity>());
  const double res = r.lpNorm<Eigen::Infinity>();
  if (!std::isfinite(res) || res > kLinearSolveTolerance * scale) {
    throw SolverError("linear solve did not reach residual tolerance (residual " +
                      std::to_string(res) + ")");
  }
  std::copy(x.data(), x.data() + n, out.begin());
}

}  // namespace mfg

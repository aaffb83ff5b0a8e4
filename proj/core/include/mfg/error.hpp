#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace mfg {

/// Raised when a constructor or operation receives data that violates its
/// preconditions (bad grid sizes, invalid model parameters, densities off P_N).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical hard failure: linear solve residual too large, non-finite
/// Hamiltonian, negative density beyond round-off.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what, std::optional<std::size_t> step = std::nullopt)
      : std::runtime_error(step ? what + " (time step " + std::to_string(*step) + ")" : what),
        step_(step) {}

  std::optional<std::size_t> step() const noexcept { return step_; }

 private:
  std::optional<std::size_t> step_;
};

}  // namespace mfg

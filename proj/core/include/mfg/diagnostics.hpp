#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mfg/coupler.hpp"

namespace mfg {

// ---------------------------------------------------------------------------
// Gradient-range constants

struct GradientRangeConstants {
  double C_H = 0.0;
  double C_bar_H = 0.0;
  /// the two routes to C_bar_H: pairwise difference quotients on the
  /// lattice and finite-difference Jacobian norms at lattice points
  double pairwise_lipschitz = 0.0;
  double jacobian_lipschitz = 0.0;
  /// axis-aligned box containing every realized discrete gradient
  Vec2 box_lo{0.0, 0.0};
  Vec2 box_hi{0.0, 0.0};
};

/// C_H = max_k sup |D_pH_k(x_j, p)|,
/// C_bar_H = max_k sup |D_pH_k(x_j,p) - D_pH_k(x_j,q)| / |p - q|,
/// both over cell centers x_j and p, q on a lattice (`lattice` points per
/// axis) spanning the bounding box of all realized gradients of all
/// solutions. The box contains the convex hull of the gradients.
GradientRangeConstants gradient_range_constants(std::span<const MFGSolution> solutions,
                                                std::span<const HamiltonianPtr> hamiltonians,
                                                std::size_t lattice = 5);

/// The same constants for an explicit box [lo, hi] of momenta.
GradientRangeConstants constants_on_box(const Grid& grid, std::span<const HamiltonianPtr> hamiltonians,
                                        const Vec2& lo, const Vec2& hi, std::size_t lattice = 5);

// ---------------------------------------------------------------------------
// Smallness certificate

struct PsiInputs {
  double T = 0.0;
  double L_F = 0.0;
  double L_G = 0.0;
  double C_H = 0.0;
  double C_bar_H = 0.0;
  double N = 1.0;
  double M = 0.0;
};

/// Psi = T Cb^2 (N C e^{C^4 T^2} M^2) (L_G + L_F C T / 2) with
/// C = max(C_H, 1) and Cb = C_bar_H. Negative inputs are rejected.
double compute_psi(const PsiInputs& in);

enum class Provenance { Declared, Empirical };

struct Ingredient {
  double value = 0.0;
  Provenance provenance = Provenance::Empirical;
};

struct CertificateInputs {
  double T = 0.0;
  std::size_t N = 1;
  Ingredient L_F;
  Ingredient L_G;
  Ingredient C_H;
  Ingredient C_bar_H;
  Ingredient M;
};

struct Certificate {
  double psi = 0.0;
  bool all_declared = false;
  /// "certified small-data regime", "empirical" or "not small".
  std::string verdict;
  /// Per smallness route, the value at which Psi reaches 1 with everything
  /// else held fixed: the largest horizon, the largest C_bar_H, and the
  /// largest common scale of (L_F, L_G). Empty when unbounded.
  std::optional<double> horizon_threshold;
  std::optional<double> c_bar_h_threshold;
  std::optional<double> lipschitz_scale_threshold;
};

Certificate certify(const CertificateInputs& in);

// ---------------------------------------------------------------------------
// Value bound |v_k| <= C_G + T (C_F + alpha)

struct ValueBoundCheck {
  bool pass = false;
  double observed = 0.0;    // max_k ||v_k||_inf
  double bound = 0.0;       // C_G + T (C_F + alpha)
  double tol_scheme = 0.0;  // 10 (dt + h^2) (C_F + alpha + C_G)
  double margin = 0.0;      // bound + tol_scheme - observed
};

ValueBoundCheck value_bound_check(const MFGSolution& solution, double C_F, double C_G, double alpha,
                                  const TimeGrid& time, const Grid& grid);

// ---------------------------------------------------------------------------
// Density bound  ||m_k||_inf <= C [1 + ||m_0k||_inf + (1+T) ||D_pH_k||_inf]^r

struct DensityBoundEntry {
  double T = 0.0;
  std::vector<double> sup_density;  // per population, over all (t, x)
  std::vector<double> sup_initial;
  std::vector<double> sup_drift;
  std::vector<double> bracket;
  double M = 0.0;  // max_k sup_density
};

DensityBoundEntry density_bound_report(const MFGSolution& solution, const DensityVector& initial,
                                       std::span<const HamiltonianPtr> hamiltonians);

struct DensityBoundFit {
  double C = 0.0;
  double r = 0.0;
  /// one flag per (entry, population): sup m exceeds 2 C bracket^r
  std::vector<bool> violations;
};

/// Least-squares fit of log M = log C + r log bracket over every
/// (entry, population) point. Empty when the brackets do not vary.
std::optional<DensityBoundFit> fit_density_bound(std::span<const DensityBoundEntry> entries);

// ---------------------------------------------------------------------------
// Continuous dependence on m_0

struct PerturbationRow {
  double epsilon = 0.0;
  double ratio = 0.0;  // sup_t ||dm(t)||_2^2 / ||dm_0||_2^2
  bool converged = false;
};

struct ContinuousDependenceReport {
  std::vector<PerturbationRow> rows;
  bool baseline_converged = false;
  /// max/min ratio over converged rows; empty with fewer than one
  std::optional<double> spread;
  bool bounded = false;  // spread <= 10
};

/// Perturbs m_0 toward a fixed sampled density: m_0 + eps (d - m_0), which
/// stays in P_N for eps in (0,1].
ContinuousDependenceReport continuous_dependence_probe(const MFGProblem& problem, std::span<const double> epsilons,
                                                       const PicardOptions& options, std::uint64_t seed);

}  // namespace mfg

#include "mfgcli/scenarios.hpp"

#include <array>

namespace mfg::cli {

namespace {

// Schelling runs use H = (1 + |p|^2)/2: alpha = (1 + sqrt 2)/2 < 1.21 and
// D_pH = p, so dp_lipschitz = 1. With epsilon = 0.05 and a = 0.4 the
// smoothed cost is bounded by (sqrt(a^2 + eps^2) + a)/2 < 0.4016.
constexpr std::string_view kSchellingSmallT = R"(name: schelling_smallT
description: two-population Schelling segregation at a short horizon
domain: {x: [0, 1], nx: 100}
time: {horizon: 0.05, steps: 100}
populations:
  - viscosity: 0.1
    hamiltonian: {type: power, b: 0.5, c: 1, beta: 2, alpha: 1.21, dp_lipschitz: 1}
    m0: {type: cosine, amplitude: 0.5}
  - viscosity: 0.1
    hamiltonian: {type: power, b: 0.5, c: 1, beta: 2, alpha: 1.21, dp_lipschitz: 1}
    m0: {type: cosine, amplitude: -0.5}
cost:
  running: {type: schelling, thresholds: [0.4, 0.4], eta: 0.001, epsilon: 0.05, radius: 0.1, ramp: 0.05}
  terminal: {type: zero}
  declared: {L_G: 0, C_F: 0.4016, C_G: 0, C_prime_G: 0}
solver: {damping: 0.5, tolerance: 1.0e-9, max_iterations: 500}
task: {kind: diagnose, n_starts: 4, seed: 7}
diagnostics: {epsilons: [1.0e-2, 1.0e-3, 1.0e-4], lipschitz_pairs: 200, monotonicity_pairs: 500}
output: {snapshot_every: 10}
)";

// Stronger thresholds (a = 0.6): C_F < (sqrt(0.36 + 0.0025) + 0.6)/2 < 0.6011.
constexpr std::string_view kSchellingLargeT = R"(name: schelling_largeT_sweep
description: Schelling segregation over a range of horizons; exploratory
domain: {x: [0, 1], nx: 100}
time: {horizon: 1.0, steps: 100}
populations:
  - viscosity: 0.05
    hamiltonian: {type: power, b: 0.5, c: 1, beta: 2, alpha: 1.21, dp_lipschitz: 1}
    m0: {type: cosine, amplitude: 0.5}
  - viscosity: 0.05
    hamiltonian: {type: power, b: 0.5, c: 1, beta: 2, alpha: 1.21, dp_lipschitz: 1}
    m0: {type: cosine, amplitude: -0.5}
cost:
  running: {type: schelling, thresholds: [0.6, 0.6], eta: 0.001, epsilon: 0.05, radius: 0.1, ramp: 0.05}
  terminal: {type: zero}
  declared: {L_G: 0, C_F: 0.6011, C_G: 0, C_prime_G: 0}
solver: {damping: 0.5, tolerance: 1.0e-9, max_iterations: 400}
task:
  kind: sweep
  seed: 11
  sweep:
    parameter: time.horizon
    values: [0.05, 0.1, 0.2, 0.4, 0.7, 1.0, 1.5, 2.0, 3.0, 4.0]
    task: diagnose
diagnostics: {epsilons: [], lipschitz_pairs: 100, monotonicity_pairs: 100}
output: {snapshot_every: 20}
)";

// Robust control Hamiltonian with f = 0, g = 1, delta = 1: the curvature
// g^2 - sigma^2/delta is 0.75 for sigma = 0.5 (convex) and -1.25 for
// sigma = 1.5 (concave). alpha = 1.21 |curvature| covers both.
// F = int K m with 0 <= K <= 1 gives C_F = 1 and L_F <= ||K||_2^2 <= 1.
constexpr std::string_view kRobust1d = R"(name: robust_1d
description: robust-control Hamiltonian in the convex and concave regimes
domain: {x: [0, 1], nx: 100}
time: {horizon: 0.2, steps: 100}
populations:
  - viscosity: 0.2
    hamiltonian: {type: robust, f: [0], g: 1, sigma: 0.5, delta: 1, alpha: 1.6}
    m0: {type: gaussian, center: 0.3, width: 0.1}
cost:
  running:
    type: integral
    kernel: {type: gauss, width: 0.1, amplitude: 1}
  terminal:
    type: fixed
    fields: [{type: cos, amplitude: 0.1}]
  declared: {L_F: 1, L_G: 0, C_F: 1, C_G: 0.1, C_prime_G: 0.32}
solver: {damping: 0.5, tolerance: 1.0e-9, max_iterations: 500}
task:
  kind: sweep
  seed: 5
  sweep:
    parameter: populations.0.hamiltonian.sigma
    values: [0.5, 1.5]
    task: diagnose
diagnostics: {epsilons: [], lipschitz_pairs: 50, monotonicity_pairs: 100}
output: {snapshot_every: 10}
)";

// F and G do not depend on m. All certificate ingredients are declared:
// L_F = L_G = 0 exactly, so Psi = 0 whatever the other constants.
constexpr std::string_view kDecoupled = R"(name: decoupled_sanity
description: m-independent costs; the fixed point is reached after two iterations
domain: {x: [0, 1], nx: 100}
time: {horizon: 0.5, steps: 100}
populations:
  - viscosity: 0.1
    hamiltonian: {type: power, b: 0.5, c: 0, beta: 2, alpha: 1.21, dp_lipschitz: 1}
    m0: {type: cosine, amplitude: 0.8}
  - viscosity: 0.2
    hamiltonian: {type: power, b: 0.5, c: 0, beta: 2, alpha: 1.21, dp_lipschitz: 1}
    m0: {type: gaussian, center: 0.7, width: 0.15}
cost:
  running:
    type: fixed
    fields: [{type: cos, amplitude: 0.5}, {type: sin, amplitude: 0.3}]
  terminal:
    type: fixed
    fields: [{type: cos, amplitude: 0.2}, 0]
  declared: {L_F: 0, L_G: 0, C_F: 0.5, C_G: 0.2, C_prime_G: 0.7}
certificate: {C_H: 10, C_bar_H: 1, M: 10}
solver: {damping: 1, tolerance: 1.0e-9, max_iterations: 50}
task: {kind: solve, n_starts: 4, seed: 3}
output: {snapshot_every: 10}
)";

constexpr std::string_view kMms = R"(name: mms_convergence
description: manufactured solution v = (1+t) cos(pi x) for the HJB solver
task:
  kind: mms
  mms:
    horizon: 0.5
    viscosity: 1
    spatial_cells: [10, 20, 40]
    spatial_steps: 4000
    temporal_cells: 20
    temporal_steps: [50, 100, 200]
    reference_steps: 12800
)";

constexpr std::array<Scenario, 5> kScenarios{{
    {"schelling_smallT", "Schelling segregation, T = 0.05 (small-horizon uniqueness regime)", kSchellingSmallT},
    {"schelling_largeT_sweep", "Schelling segregation, horizon sweep up to T = 4", kSchellingLargeT},
    {"robust_1d", "robust-control Hamiltonian, convex and concave regimes", kRobust1d},
    {"decoupled_sanity", "decoupled problem, two-iteration fixed point", kDecoupled},
    {"mms_convergence", "HJB observed orders in time and space", kMms},
}};

}  // namespace

std::span<const Scenario> bundled_scenarios() noexcept { return kScenarios; }

const Scenario* find_scenario(std::string_view name) noexcept {
  for (const auto& s : kScenarios) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

}  // namespace mfg::cli

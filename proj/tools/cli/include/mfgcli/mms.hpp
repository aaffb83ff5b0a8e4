#pragma once

#include <optional>
#include <vector>

#include "mfgcli/config.hpp"

namespace mfg::cli {

struct MmsRow {
  std::size_t cells = 0;
  std::size_t steps = 0;
  double error = 0.0;
  std::optional<double> order;  // log2(previous error / error)
};

struct MmsResult {
  /// error at t = 0 against the exact solution, dt fixed and small
  std::vector<MmsRow> spatial;
  /// error at t = 0 against a fine-dt solve on the same grid
  std::vector<MmsRow> temporal;
};

/// Refinement study with v*(t,x) = (1+t) cos(pi x) on [0,1], H = |p|^2/2
/// and the matching forcing F* = -d_t v* - nu lap v* + H(Dv*).
MmsResult run_mms(const MmsSpec& spec);

double manufactured_value(double t, double x);
double manufactured_forcing(double t, double x, double viscosity);

}  // namespace mfg::cli

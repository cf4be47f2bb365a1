#pragma once

// Picard iteration for u(t) = V(t) u0 + int_0^t V(t - t') N(u(t')) dt' on a
// uniform time grid, with the layered norm diagnostics of the contraction
// argument recorded per iterate.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dklb/grid.hpp"
#include "dklb/symbols.hpp"
#include "dklb/trajectory.hpp"

namespace dklb {

struct PicardOptions {
  std::size_t nt = 64;        // even
  std::size_t max_iter = 50;
  double tol = 1e-8;
  double s = 0.0;             // H^s index of the contraction metric
  bool nonlinear = true;
  std::optional<double> r;    // enables lambda_7 with weight |x|^r
  std::optional<double> b;    // enables lambda_8 with weight e^{bx}
  double cstar = 1.0;
};

/// lambda_1 .. lambda_8 (index 0 is lambda_1); disabled entries are empty.
struct LambdaValues {
  std::array<std::optional<double>, 8> lambda;
  std::optional<double> Lambda;  // lambda_1 + ... + lambda_5
  std::optional<double> Omega;   // Lambda + lambda_6 + lambda_7
  std::optional<double> Theta;   // Lambda + lambda_6 + lambda_8
};

LambdaValues lambda_values(const Trajectory& w, double s, std::optional<double> r,
                           std::optional<double> b);

struct ContractionReport {
  std::vector<double> iterate_distances;
  std::vector<LambdaValues> lambda_values;  // one per iterate, starting with u^(0)
  /// Lambda(u^(n+1)) / (||u0||_{H^s} + (A2 + A3) Lambda(u^(n))^2) per step.
  std::vector<double> contraction_constants;
  double z_bound = 0.0;
  double T_used = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  /// False when p <= 5/2, outside the range where the contraction argument applies.
  bool within_hypothesis = true;
  std::string note;
};

struct PicardResult {
  Trajectory trajectory;
  ContractionReport report;
};

/// Non-convergence returns the last iterate with converged = false. NaN or
/// Inf in an iterate throws NumericalError.
PicardResult picard_solve(const SpectralField& u0, const PhaseFunction& phi, double T,
                          const PicardOptions& opts = {});

}  // namespace dklb

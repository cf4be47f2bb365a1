#pragma once

// Fourth-order exponential time differencing (Cox-Matthews scheme with the
// Kassam-Trefethen contour evaluation of the phi-functions).

#include <cstddef>
#include <vector>

#include "dklb/grid.hpp"
#include "dklb/symbols.hpp"
#include "dklb/trajectory.hpp"

namespace dklb {

struct Etdrk4Coefficients {
  std::vector<cplx> E, E2, Q, f1, f2, f3;
};

/// Coefficients for the linear symbol c(xi) = i xi^3 + eta Phi(xi) and step h.
/// phi-functions use a 32-point contour mean of radius 1, switching to Taylor
/// series for |h c| < 1e-4. The Nyquist mode is zeroed.
Etdrk4Coefficients etdrk4_coefficients(const PhaseFunction& phi, const SpectralGrid& grid,
                                       double h);

struct Etdrk4Options {
  bool nonlinear = true;
  std::size_t save_every = 1;
};

/// Integrates to T with steps dt (T/dt must be an integer to 1e-9). Throws
/// NumericalError naming the step if a non-finite value appears.
Trajectory etdrk4_solve(const SpectralField& u0, const PhaseFunction& phi, double T, double dt,
                        const Etdrk4Options& opts = {});

}  // namespace dklb

#pragma once

// Linear semigroup, the quadratic nonlinearity and the existence-time rule.
// Picard iteration and the exponential integrator live in picard.hpp and
// etdrk4.hpp.

#include <cstddef>
#include <vector>

#include "dklb/grid.hpp"
#include "dklb/symbols.hpp"
#include "dklb/trajectory.hpp"

namespace dklb {

/// Multiplier of V(t) on the grid. The Nyquist mode is zeroed for t > 0;
/// t = 0 gives exactly 1 everywhere.
std::vector<cplx> grid_semigroup_multiplier(const PhaseFunction& phi, double t,
                                            const SpectralGrid& grid);

/// V(t) f. Throws ValidationError for t < 0.
SpectralField apply_semigroup(const PhaseFunction& phi, double t, const SpectralField& f);

/// -1/2 d/dx (f^2) with the dealiased product.
SpectralField nonlinearity(const SpectralField& f);

/// V(t_k) u0 on t_k = k T / nt, k = 0..nt.
Trajectory linear_solve(const SpectralField& u0, const PhaseFunction& phi, double T,
                        std::size_t nt);

struct ExistenceTime {
  double T0;
  double z0;
};

/// z0 = 2 cstar ||u0||_{H^s}; T0 = min(1, T~) where T~ is the largest T with
/// (A2 + A3)(T) < (2 cstar z0)^{-1}. A zero norm gives T0 = 1.
ExistenceTime existence_time(double u0_hs_norm, const PhaseFunction& phi, double s, double cstar);

}  // namespace dklb

#pragma once

// Exponential-weight conjugation of the KdV-KS linear flow,
//   e^{bx} V(t) f = W(t) (e^{bx} f),
// where W(t) has the multiplier exp{-t[(i xi - b)^3 + eta((i xi - b)^2 + (i xi - b)^4)]},
// together with the polynomial-weight exchange check and the regularity-gain
// probe for the optimality family.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dklb/grid.hpp"
#include "dklb/norms.hpp"
#include "dklb/symbols.hpp"

namespace dklb {

/// delta = eta (b^2 + b^4) - b^3
double conjugation_delta(double b, double eta);
/// mu = 3 b^2 - 2 eta b - 4 eta b^3
double conjugation_mu(double b, double eta);
/// theta(xi) = eta xi^4 + (3b - eta - 6 eta b^2) xi^2
double conjugation_theta(double xi, double b, double eta);

/// Direct complex evaluation in z = i xi - b. The real part of the exponent is
/// capped at kMaxMultiplierExponent; `clamped` receives the number of capped entries.
std::vector<cplx> conjugated_multiplier(double b, double eta, double t,
                                        std::span<const double> xis,
                                        std::size_t* clamped = nullptr);

/// The same multiplier from the expanded real and imaginary parts.
std::vector<cplx> conjugated_multiplier_expanded(double b, double eta, double t,
                                                 std::span<const double> xis);

/// exp(t P(i xi - b)) where u_t = P(d/dx) u is the linear part for `phi`.
/// Requires an even integer p and even integer |xi| powers n_i (so that P is
/// a polynomial); throws ValidationError otherwise.
std::vector<cplx> shifted_polynomial_multiplier(const PhaseFunction& phi, double b, double t,
                                                std::span<const double> xis);

/// W(t) g for KdV-KS with parameter eta. Nyquist is zeroed for t > 0.
SpectralField conjugated_propagator(double b, double eta, double t, const SpectralField& g);
/// W(t) g for a general even-integer symbol via shifted_polynomial_multiplier.
SpectralField conjugated_propagator(const PhaseFunction& phi, double b, double t,
                                    const SpectralField& g);

struct ConjugationResult {
  double rel_error = 0.0;
  double bound_ratio = 0.0;
  double boundary_leakage = 0.0;
  double delta = 0.0;
  double mu = 0.0;
};

/// Compares e^{bx}(V(t) f), evaluated in extended precision, with
/// W(t)(e^{bx} f) in double precision. Samples of f below 1e-15 of its peak
/// are treated as zero before weighting. bound_ratio is
/// ||e^{bx} V(t) f|| / (e^{-t delta} (1 + e^t) ||e^{bx} f||). Refuses with
/// ValidationError when the boundary leakage of e^{bx} f or of either side
/// exceeds `leakage_threshold`.
ConjugationResult conjugation_check(const SpectralField& f, double b, double eta, double t,
                                    double leakage_threshold = kDefaultLeakageThreshold);

/// Weight-growth order used in the exchange check: K = p - 1.
double exchange_order(const PhaseFunction& phi);

/// ||x|^r V(t) u0|| / ((1 + t) ||u0||_{H^s} + ||x|^r u0||); 0 for u0 = 0.
/// Throws ValidationError when r > s / K.
double weight_exchange_check(const SpectralField& u0, const PhaseFunction& phi, double r,
                             double s, double t);

/// One report per t, over the Gaussian-mixture ensemble.
std::vector<NormEnsembleReport> weight_exchange_ensemble(const PhaseFunction& phi,
                                                         const GridPtr& grid, double r, double s,
                                                         std::span<const double> ts,
                                                         std::size_t ensemble_size,
                                                         std::uint64_t seed);

struct RegularityProbeParams {
  int k = 2;
  double alpha_decay = 0.5;
  double gamma = 0.5;     // cusp exponent of (x^2 + h^2)^{gamma/2}
  double h = 0.05;        // mollification scale
  double epsilon = 0.01;  // extra decay
  double eta = 1.0;
  std::size_t n = 1024;
  double length = 60.0;
  std::vector<double> t_grid{0.01, 0.05, 0.1, 0.5};
  std::vector<double> sigma_grid;  // empty: 0 .. 2 * (2 k alpha) in 9 steps
};

struct RegularityProbeRow {
  double sigma;
  double t;
  double norm;         // ||D^sigma V(t) u0||
  double fitted_rate;  // norm / (t^{-sigma/(2k)} ||u0||)
  double bound;        // sup_xi |xi|^sigma e^{eta t Phi(xi)} ||u0||
};

/// Probe datum (x^2+h^2)^{gamma/2} <x>^{-(alpha+1/2+epsilon)} times a smooth window.
SpectralField regularity_probe_datum(const GridPtr& grid, const RegularityProbeParams& params);

/// Tabulates norms under the Optimality(k) linear flow. Throws NumericalError
/// if a norm exceeds its multiplier bound.
std::vector<RegularityProbeRow> regularity_gain_probe(const RegularityProbeParams& params);

}  // namespace dklb

#pragma once

// Norm functionals on fields and trajectories, the smoothing exponents
// alpha(a,b,s) and constants A(a,b,s)(T), and ensemble checks of the
// linear smoothing estimates.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "dklb/grid.hpp"
#include "dklb/symbols.hpp"
#include "dklb/trajectory.hpp"

namespace dklb {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// 1/a - s/p - (1/p)(1/a1 - 1/b) with 1/a + 1/a1 = 1 and 1/inf = 0.
double alpha(double a, double b, double s, double p);

struct SmoothingParams {
  double a = 2.0;
  double b = 4.0;  // may be kInf
  double s = 0.0;
  double p = 4.0;
  double T = 1.0;
  double eta = 1.0;

  double a1() const { return a / (a - 1.0); }
};

/// e^{eta T} T^{1/a} + (a alpha)^{-1/a} T^alpha. Throws ValidationError when alpha <= 0.
double smoothing_A(const SmoothingParams& params);
double smoothing_A(const PhaseFunction& phi, double a, double b, double s, double T);

double A2(const PhaseFunction& phi, double T);            // A(2,4,0)
double A3(const PhaseFunction& phi, double s, double T);  // A(2,4,s)
double A4(const PhaseFunction& phi, double T);            // A(2,4,1)
double A6(const PhaseFunction& phi, double T);            // A(2,inf,1)

/// ||J^s f||_{L2}.
double hs_norm(const SpectralField& f, double s);
/// ||w f||_{L2} on the fundamental domain.
double weighted_norm(const SpectralField& f, const WeightSpec& w);
/// (dx sum |u|^q)^{1/q}, or max |u| for q = inf.
double lp_norm(std::span<const cplx> samples, const SpectralGrid& grid, double q);

enum class SpatialOpKind { None, D, Dx, DDx, J };

/// Spatial operator applied before a mixed norm: D^s, d/dx, D^s d/dx or J^s.
struct SpatialOp {
  SpatialOpKind kind = SpatialOpKind::None;
  double s = 0.0;

  SpectralField apply(const SpectralField& f) const;
};

enum class NormOrder {
  TOuterXInner,  // || ||f(t)||_{L^inner_x} ||_{L^outer_T}
  XOuterTInner,  // || ||f(x)||_{L^inner_T} ||_{L^outer_x}
};

/// Mixed space-time norm with composite trapezoid weights in t and the grid
/// quadrature in x; exponents may be kInf (maximum). Throws on empty input.
double mixed_norm(const Trajectory& traj, double outer, double inner, const SpatialOp& op,
                  NormOrder order);

enum class SmoothingCase { C1, C2, C3, C4, PInf };

std::string smoothing_case_name(SmoothingCase c);
SmoothingCase parse_smoothing_case(const std::string& name);

struct SmoothingSetup {
  SmoothingCase kind = SmoothingCase::C2;
  double s = 0.0;    // C1-C4
  double a = 2.0;    // C1 time exponent
  double b = 4.0;    // C2, C3 space exponent
  double q = 0.5;    // PInf derivative order
  double T = 0.5;
  std::size_t nt = 64;

  /// Throws ValidationError if the case's hypothesis fails for phase p.
  void check_hypothesis(double p) const;
  std::string id() const;
};

struct NormEnsembleReport {
  std::string inequality_id;
  std::size_t sample_count = 0;
  std::vector<double> ratios;
  double max_ratio = 0.0;
  double fitted_constant = 0.0;
};

/// LHS / RHS (with c = 1) for one initial datum; 0 for zero data.
double smoothing_ratio(const SmoothingSetup& setup, const PhaseFunction& phi,
                       const SpectralField& u0);

/// Ratios over a Gaussian-mixture ensemble; every sample is multiplied by `scale`.
NormEnsembleReport verify_smoothing(const SmoothingSetup& setup, const PhaseFunction& phi,
                                    const GridPtr& grid, std::size_t ensemble_size,
                                    std::uint64_t seed, double scale = 1.0);

/// ||<x>^{theta b} J^{(1-theta) a} f|| / (||<x>^b f||^theta ||J^a f||^{1-theta}); 0 for f = 0.
double interpolation_check(const SpectralField& f, double a, double b, double theta,
                           double p_exp = 2.0);

}  // namespace dklb

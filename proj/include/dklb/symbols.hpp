#pragma once

// Dissipation symbol Phi(xi) = -|xi|^p + sum_i c_i xi^{m_i} |xi|^{n_i}, the
// semigroup multiplier exp(i t xi^3 + eta t Phi(xi)), and the threshold M
// beyond which Phi is dominated by its leading term.

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dklb {

using cplx = std::complex<double>;

/// One summand c * xi^m * |xi|^n of the lower-order part Phi_1.
struct PhaseTerm {
  double coeff = 0.0;
  int m = 0;        // signed power
  double n = 0.0;   // absolute power

  double order() const { return static_cast<double>(m) + n; }
  double eval(double xi) const;
};

class PhaseFunction {
 public:
  /// Validates p > 0, eta > 0, m >= 0, n >= 0 and m + n < p for every term,
  /// then computes and stores the threshold M. Throws ValidationError.
  PhaseFunction(double p, std::vector<PhaseTerm> terms, double eta);

  double p() const { return p_; }
  double eta() const { return eta_; }
  /// Smallest M with |Phi(xi)| >= |xi|^p/2 and Phi_1(xi) <= |xi|^p/2 for all |xi| >= M.
  double threshold() const { return threshold_; }
  std::span<const PhaseTerm> terms() const { return terms_; }

  double eval(double xi) const;
  double lower_order(double xi) const;
  /// True when every term has an even signed power, i.e. Phi(-xi) == Phi(xi).
  bool is_even() const;
  /// max_i (m_i + n_i), or 0 without terms.
  double max_term_order() const;

  /// Both threshold conditions at xi and -xi.
  bool threshold_conditions_hold(double xi) const;

  /// Human-readable form, e.g. "p=4, terms=[(1,0,2)], eta=1".
  std::string describe() const;

 private:
  double p_;
  double eta_;
  std::vector<PhaseTerm> terms_;
  double threshold_ = 0.0;
};

enum class PresetKind { KdVB, OST, KdVKS, Optimality };

struct ModelPreset {
  PresetKind kind;
  int k = 0;  // Optimality order, k >= 2
  PhaseFunction phase;

  /// Canonical name: kdvb, ost, kdvks, optimality:k.
  std::string name() const;
};

/// KdVB: p=2, Phi_1=0. OST: p=3, Phi_1=|xi|. KdVKS: p=4, Phi_1=xi^2.
/// Optimality(k): Phi = -|xi|^{2k} + xi^{2k-3}|xi|^2.
ModelPreset make_preset(PresetKind kind, double eta, int k = 0);

/// Accepts a preset name (kdvb, ost, kdvks, optimality:k) or a custom symbol
/// "p=<real>, terms=[(c,m,n),...], eta=<real>". `eta` is used for presets and
/// as the default when a custom symbol omits it.
PhaseFunction parse_phase(std::string_view text, double eta);

/// True if `text` names a preset rather than a custom symbol.
bool is_preset_name(std::string_view text);

double phase_eval(const PhaseFunction& phi, double xi);

/// Bisection for the threshold M; see PhaseFunction::threshold().
double find_M(const PhaseFunction& phi);

/// Real part of the exponent is capped at this value.
inline constexpr double kMaxMultiplierExponent = 50.0;

/// exp(i t xi^3 + eta t Phi(xi)) element-wise. When `clamped` is given it
/// receives the number of entries whose exponent was capped.
std::vector<cplx> semigroup_multiplier(const PhaseFunction& phi, double t,
                                       std::span<const double> xis,
                                       std::size_t* clamped = nullptr);

/// sup over real xi of |xi|^{2q} exp(2 eta t Phi(xi)), t > 0.
double sup_weighted_multiplier(const PhaseFunction& phi, double q, double t);

}  // namespace dklb
